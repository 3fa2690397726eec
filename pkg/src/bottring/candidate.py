"""Candidate ring maps H*(source) -> H*(target) given by their action on H^2.

``P[i][j]`` is the coefficient of ``y_{i+1}`` in the image of ``x_{j+1}``, so
column ``j`` of ``P`` is the image of the ``j``-th generator.  A ring
homomorphism out of H*(source) is determined by these images, and it is
well defined exactly when every relation ``x_j^2 = alpha_j x_j`` is respected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from . import intmat
from .errors import AmbientMismatch, DimensionMismatch, Unverified
from .ring import BottMatrix, alpha, h2_product, h2_square, validate


@dataclass(frozen=True)
class IsoCandidate:
    source: BottMatrix
    target: BottMatrix
    P: tuple
    verified: bool = field(default=False, compare=False)

    def __post_init__(self):
        P = tuple(tuple(int(x) for x in row) for row in self.P)
        object.__setattr__(self, "P", P)
        if self.source.n != self.target.n:
            raise DimensionMismatch(
                f"source has {self.source.n} stages, target has {self.target.n}"
            )
        n = self.source.n
        if len(P) != n or any(len(row) != n for row in P):
            raise DimensionMismatch(f"P must be {n}x{n}")

    @property
    def n(self):
        return self.source.n

    def image(self, j):
        """Image of ``x_j`` (1-based) in the target basis."""
        return tuple(row[j - 1] for row in self.P)

    def apply(self, v):
        return intmat.matvec(self.P, v)

    def to_json(self):
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "P": [list(row) for row in self.P],
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj):
        return cls(validate(obj["source"]), validate(obj["target"]), obj["P"])

    @classmethod
    def from_columns(cls, source, target, columns):
        return cls(source, target, intmat.transpose(columns))


def relation_residues(c):
    """For every stage, ``phi(x_j)^2 - phi(alpha_j) phi(x_j)`` in H^4 of the target."""
    out = []
    for j in range(1, c.n + 1):
        v = c.image(j)
        g = c.apply(alpha(c.source, j))
        sq = h2_square(c.target, v)
        pr = h2_product(c.target, g, v)
        out.append(tuple(a - b for a, b in zip(sq, pr)))
    return out


def is_ring_map(c):
    return all(not any(r) for r in relation_residues(c))


def iso_check(c):
    if c.source.n != c.target.n:
        raise DimensionMismatch("source and target differ in stage count")
    if abs(intmat.det(c.P)) != 1:
        return False
    return is_ring_map(c)


def certify(c):
    """Return ``c`` flagged as verified, or raise :class:`Unverified`."""
    if not iso_check(c):
        raise Unverified("candidate does not induce a graded ring isomorphism")
    return c if c.verified else replace(c, verified=True)


def is_stable(c, k):
    """True when the map restricts to span(x_1..x_k) -> span(y_1..y_k) bijectively."""
    if not c.verified:
        raise Unverified("stability is only defined for verified isomorphisms")
    n = c.n
    if any(c.P[i][j] for i in range(k, n) for j in range(k)):
        return False
    return abs(intmat.det([row[:k] for row in c.P[:k]])) == 1


def compose(second, first):
    """``second o first``; ``first.target`` must equal ``second.source``."""
    if first.target != second.source:
        raise AmbientMismatch("composition endpoints do not match")
    out = IsoCandidate(first.source, second.target, intmat.matmul(second.P, first.P))
    if first.verified and second.verified:
        # a composite of isomorphisms is one; re-verified anyway as a guard
        return certify(out)
    return out


def inverse(c):
    P = intmat.integer_inverse(c.P)
    if P is None:
        raise Unverified("P is not invertible over the integers")
    out = IsoCandidate(c.target, c.source, P)
    return certify(out) if c.verified else out


def identity(M):
    return certify(IsoCandidate(M, M, intmat.identity(M.n)))
