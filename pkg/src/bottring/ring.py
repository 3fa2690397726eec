"""Exact arithmetic in the integral cohomology ring of a Bott manifold.

A Bott tower of height ``n`` is encoded by a strictly upper-triangular integer
matrix ``A``; stage ``j`` twists by the degree-2 class
``alpha_j = sum_{i<j} A[i][j] x_i`` and the cohomology ring is

    Z[x_1, ..., x_n] / (x_j^2 - alpha_j x_j).

Every element has a unique expression in square-free monomials.  Stage indices
are 1-based in the public API (``alpha(M, 1)`` is the zero class); degree-2
classes are plain tuples ``(c_1, ..., c_n)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd

from .errors import AmbientMismatch, BadDimension, IndexOutOfRange, NonTriangular


@dataclass(frozen=True, order=True)
class BottMatrix:
    """Strictly upper-triangular integer matrix presenting a Bott tower.

    ``columns[j - 1]`` holds ``(A^1_j, ..., A^{j-1}_j)``; the first column is
    always empty.
    """

    n: int
    columns: tuple

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise BadDimension(f"stage count must be a positive integer, got {self.n!r}")
        if len(self.columns) != self.n:
            raise BadDimension(f"expected {self.n} columns, got {len(self.columns)}")
        for j, col in enumerate(self.columns):
            if len(col) > j:
                raise NonTriangular(f"column {j + 1} has an entry on or below the diagonal")
            if len(col) < j:
                raise BadDimension(f"column {j + 1} needs {j} entries, got {len(col)}")
            for a in col:
                if isinstance(a, bool) or not isinstance(a, int):
                    raise BadDimension(f"entries must be integers, got {a!r}")

    @classmethod
    def from_columns(cls, cols, n=None):
        """Build from the wire form: ``cols`` lists columns 2..n."""
        cols = [tuple(c) for c in cols]
        if n is None:
            n = len(cols) + 1
        return cls(n, ((),) + tuple(cols))

    @classmethod
    def zero(cls, n):
        return cls(n, tuple((0,) * j for j in range(n)))

    @classmethod
    def hirzebruch(cls, a):
        return cls(2, ((), (a,)))

    def entry(self, i, j):
        """``A^i_j`` (1-based, ``i < j``)."""
        if not 1 <= i < j <= self.n:
            raise IndexOutOfRange(f"no entry ({i}, {j}) in a {self.n}-stage matrix")
        return self.columns[j - 1][i - 1]

    def flat(self):
        return tuple(itertools.chain.from_iterable(self.columns))

    def max_abs_entry(self):
        return max((abs(a) for a in self.flat()), default=0)

    def replace_entries(self, changes):
        """Return a copy with ``{(i, j): value}`` (1-based) overwritten."""
        cols = [list(c) for c in self.columns]
        for (i, j), v in changes.items():
            if not 1 <= i < j <= self.n:
                raise NonTriangular(f"entry ({i}, {j}) is not strictly upper-triangular")
            cols[j - 1][i - 1] = v
        return BottMatrix(self.n, tuple(tuple(c) for c in cols))

    def to_json(self):
        return {"n": self.n, "cols": [list(c) for c in self.columns[1:]]}

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __repr__(self):
        return f"BottMatrix({self.dumps()})"


def validate(raw):
    """Turn raw data into a :class:`BottMatrix`.

    Accepted shapes: the wire form ``{"n": n, "cols": [[A12], [A13, A23], ...]}``,
    an entry map ``{"n": n, "entries": {(i, j): A}}`` (1-based, also ``"i,j"``
    string keys), or a full square list of rows with ``rows[i][j] = A^{i+1}_{j+1}``.
    """
    if isinstance(raw, BottMatrix):
        return raw
    if isinstance(raw, dict):
        n = raw.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise BadDimension(f"stage count must be a positive integer, got {n!r}")
        if "entries" in raw:
            cols = [[0] * j for j in range(n)]
            for key, value in raw["entries"].items():
                i, j = (int(s) for s in key.split(",")) if isinstance(key, str) else key
                if i >= j:
                    raise NonTriangular(f"entry ({i}, {j}) has i >= j")
                if not (1 <= i and j <= n):
                    raise BadDimension(f"entry ({i}, {j}) outside a {n}-stage matrix")
                cols[j - 1][i - 1] = value
            return BottMatrix(n, tuple(tuple(c) for c in cols))
        cols = raw.get("cols", [])
        if len(cols) != n - 1:
            raise BadDimension(f"expected {n - 1} columns for n={n}, got {len(cols)}")
        return BottMatrix.from_columns(cols, n)
    if isinstance(raw, (list, tuple)):
        n = len(raw)
        if n < 1:
            raise BadDimension("empty matrix")
        if any(len(row) != n for row in raw):
            raise BadDimension("full-matrix form must be square")
        for i in range(n):
            for j in range(i + 1):
                if raw[i][j]:
                    raise NonTriangular(f"nonzero entry at ({i + 1}, {j + 1}) with i >= j")
        return BottMatrix(n, tuple(tuple(raw[i][j] for i in range(j)) for j in range(n)))
    raise BadDimension(f"cannot read a Bott matrix from {type(raw).__name__}")


def loads(text):
    return validate(json.loads(text))


def alpha(M, j):
    """Twist class of stage ``j`` as a degree-2 vector."""
    if not 1 <= j <= M.n:
        raise IndexOutOfRange(f"stage {j} outside 1..{M.n}")
    col = M.columns[j - 1]
    return tuple(col) + (0,) * (M.n - len(col))


def graded_rank(M, k):
    return comb(M.n, k) if k >= 0 else 0


def basis(M, k):
    """Square-free monomials of half-degree ``k``, as sorted index tuples."""
    return list(itertools.combinations(range(1, M.n + 1), k))


@lru_cache(maxsize=1 << 18)
def _reduce(M, exps):
    # normal form of prod x_i^exps[i]; largest repeated index is rewritten first
    for j in range(M.n - 1, -1, -1):
        if exps[j] >= 2:
            break
    else:
        return (((tuple(i + 1 for i, e in enumerate(exps) if e)), 1),)
    out = {}
    for i, a in enumerate(M.columns[j]):
        if a:
            e = list(exps)
            e[j] -= 1
            e[i] += 1
            for mono, c in _reduce(M, tuple(e)):
                out[mono] = out.get(mono, 0) + a * c
    return tuple((m, c) for m, c in out.items() if c)


def reduce_monomial(M, exps):
    """Normal form of a monomial given by its exponent vector, as a dict."""
    if len(exps) != M.n:
        raise IndexOutOfRange(f"exponent vector of length {len(exps)} for n={M.n}")
    return dict(_reduce(M, tuple(exps)))


class RingElement:
    """Element of H*(B_n) in square-free normal form.

    ``terms`` maps sorted index tuples to nonzero integers.  Instances are
    treated as immutable.
    """

    __slots__ = ("ambient", "_terms")

    def __init__(self, ambient, terms=None):
        self.ambient = ambient
        self._terms = {m: c for m, c in (terms or {}).items() if c}

    @property
    def terms(self):
        return dict(self._terms)

    def coeff(self, mono):
        return self._terms.get(tuple(mono), 0)

    def is_zero(self):
        return not self._terms

    def homogeneous(self, k):
        return RingElement(self.ambient, {m: c for m, c in self._terms.items() if len(m) == k})

    def degrees(self):
        """Half-degrees present (cohomological degree is twice this)."""
        return sorted({len(m) for m in self._terms})

    def _check(self, other):
        if not isinstance(other, RingElement):
            return RingElement(self.ambient, {(): other}) if isinstance(other, int) else None
        if other.ambient != self.ambient:
            raise AmbientMismatch("elements live in rings of different Bott matrices")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return RingElement(self.ambient, out)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ambient, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return RingElement(self.ambient, {m: c * other for m, c in self._terms.items()})
        if not isinstance(other, RingElement):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return self * other
        return NotImplemented

    def __pow__(self, k):
        return power(self, k)

    def __eq__(self, other):
        if isinstance(other, int):
            return self._terms == ({(): other} if other else {})
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ambient == other.ambient and self._terms == other._terms

    def __hash__(self):
        return hash((self.ambient, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=lambda m: (len(m), m)):
            c = self._terms[m]
            mono = "*".join(f"x{i}" for i in m) or "1"
            parts.append(f"{c}*{mono}" if m else str(c))
        return " + ".join(parts)


def mul(u, v):
    if u.ambient != v.ambient:
        raise AmbientMismatch("elements live in rings of different Bott matrices")
    M = u.ambient
    out = {}
    for mu, cu in u._terms.items():
        for mv, cv in v._terms.items():
            exps = [0] * M.n
            for i in mu:
                exps[i - 1] += 1
            for i in mv:
                exps[i - 1] += 1
            for m, c in _reduce(M, tuple(exps)):
                out[m] = out.get(m, 0) + cu * cv * c
    return RingElement(M, out)


def unit(M):
    return RingElement(M, {(): 1})


def power(z, k):
    if k < 0:
        raise ValueError("negative powers are not defined")
    result = unit(z.ambient)
    base = z
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def generator(M, i):
    if not 1 <= i <= M.n:
        raise IndexOutOfRange(f"generator x_{i} outside 1..{M.n}")
    return RingElement(M, {(i,): 1})


def embed(M, vec):
    """Degree-2 vector -> ring element."""
    if len(vec) != M.n:
        raise IndexOutOfRange(f"vector of length {len(vec)} for n={M.n}")
    return RingElement(M, {(i + 1,): c for i, c in enumerate(vec) if c})


def top_class(M):
    return RingElement(M, {tuple(range(1, M.n + 1)): 1})


def h2_pairs(n):
    """Index pairs ``(a, b)``, ``a < b`` (0-based), ordering the H^4 basis."""
    return list(itertools.combinations(range(n), 2))


def h2_product(M, v, w):
    """Product of two degree-2 classes as a vector in the H^4 monomial basis.

    Uses ``x_b^2 = sum_{a<b} A^a_b x_a x_b`` directly, so the coefficient of
    ``x_a x_b`` is ``v_a w_b + v_b w_a + A^a_b v_b w_b``.
    """
    cols = M.columns
    return tuple(
        v[a] * w[b] + v[b] * w[a] + cols[b][a] * v[b] * w[b] for a, b in h2_pairs(M.n)
    )


def h2_square(M, v):
    return h2_product(M, v, v)


# Degree-2 vector helpers.

def vec_add(v, w):
    return tuple(a + b for a, b in zip(v, w))


def vec_sub(v, w):
    return tuple(a - b for a, b in zip(v, w))


def vec_scale(k, v):
    return tuple(k * a for a in v)


def content(v):
    g = 0
    for a in v:
        g = gcd(g, a)
    return g


def is_primitive(v):
    return content(v) == 1


def canonical_sign(v):
    """Flip sign so that the first nonzero coefficient is positive."""
    for a in v:
        if a:
            return tuple(v) if a > 0 else tuple(-b for b in v)
    return tuple(v)
