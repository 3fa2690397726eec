"""Isomorphism invariants of H*(B_n).

The primitive degree-2 classes with vanishing square are, up to sign, exactly
one per stage ``j`` with ``alpha_j^2 = 0``: ``x_j - alpha_j/2`` when every
coefficient of ``alpha_j`` is even, ``2 x_j - alpha_j`` otherwise.  Everything
in :class:`Fingerprint` is derived from data a ring isomorphism must preserve.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from math import prod

from .intmat import elementary_divisors
from .ring import alpha, canonical_sign, h2_product, h2_square


def square_zero_stages(M):
    """1-based stages ``j`` with ``alpha_j^2 = 0``."""
    return [j for j in range(1, M.n + 1) if not any(h2_square(M, alpha(M, j)))]


def square_vanishing_element(M, j):
    a = alpha(M, j)
    e = [0] * M.n
    if all(c % 2 == 0 for c in a):
        e[j - 1] = 1
        z = tuple(ei - c // 2 for ei, c in zip(e, a))
    else:
        e[j - 1] = 2
        z = tuple(ei - c for ei, c in zip(e, a))
    return canonical_sign(z)


@dataclass(frozen=True)
class SquareVanishingSet:
    elements: tuple
    stages: tuple

    @property
    def t(self):
        return len(self.elements)

    def as_set(self):
        return frozenset(self.elements)


def square_vanishing_set(M):
    stages = square_zero_stages(M)
    return SquareVanishingSet(
        tuple(square_vanishing_element(M, j) for j in stages), tuple(stages)
    )


def is_q_trivial(M):
    return len(square_zero_stages(M)) == M.n


def is_well_ordered(M):
    stages = square_zero_stages(M)
    return stages == list(range(1, len(stages) + 1))


@dataclass(frozen=True)
class Fingerprint:
    n: int
    t: int
    span_index: int
    product_divisors: tuple
    mod2_square_zero_count: int

    # comparison order used for non-isomorphism witnesses
    FIELDS = ("n", "t", "spanIndex", "productDivisors", "mod2SquareZeroCount")

    def to_json(self):
        return {
            "n": self.n,
            "t": self.t,
            "spanIndex": self.span_index,
            "productDivisors": list(self.product_divisors),
            "mod2SquareZeroCount": self.mod2_square_zero_count,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            obj["n"], obj["t"], obj["spanIndex"],
            tuple(obj["productDivisors"]), obj["mod2SquareZeroCount"],
        )

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def digest(self):
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:16]

    def first_difference(self, other):
        """Name of the first field that differs, or None."""
        mine, theirs = self.to_json(), other.to_json()
        for field in self.FIELDS:
            if mine[field] != theirs[field]:
                return field
        return None


def span_index(M, elements=None):
    """Index of the lattice spanned by X in H^2; 0 when it is not of full rank."""
    if elements is None:
        elements = square_vanishing_set(M).elements
    divisors = elementary_divisors(elements, M.n)
    if len(divisors) < M.n:
        return 0
    return prod(divisors)


def product_divisors(M, elements=None):
    if elements is None:
        elements = square_vanishing_set(M).elements
    rows = [h2_product(M, z, w) for z, w in itertools.combinations_with_replacement(elements, 2)]
    return elementary_divisors(rows, len(rows[0]) if rows else 0)


def mod2_square_zero_count(M):
    return sum(
        1
        for v in itertools.product((0, 1), repeat=M.n)
        if all(c % 2 == 0 for c in h2_square(M, v))
    )


def fingerprint(M):
    X = square_vanishing_set(M).elements
    return Fingerprint(
        n=M.n,
        t=len(X),
        span_index=span_index(M, X),
        product_divisors=product_divisors(M, X),
        mod2_square_zero_count=mod2_square_zero_count(M),
    )
