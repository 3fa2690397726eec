"""Small exact integer/rational matrix helpers (lists of rows)."""

from fractions import Fraction
from itertools import combinations
from math import gcd

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors


def identity(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def matmul(P, Q):
    cols = list(zip(*Q))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in P)


def matvec(P, v):
    return tuple(sum(a * b for a, b in zip(row, v)) for row in P)


def transpose(P):
    return tuple(zip(*P))


def det(P):
    """Bareiss fraction-free determinant."""
    n = len(P)
    if n == 0:
        return 1
    a = [list(row) for row in P]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rational_inverse(P):
    """Inverse over Q as rows of Fractions; None when singular."""
    n = len(P)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(P)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return tuple(tuple(row[n:]) for row in a)


def integral(P):
    """Convert a Fraction matrix to ints, or None if some entry is not integral."""
    out = []
    for row in P:
        if any(x.denominator != 1 for x in row):
            return None
        out.append(tuple(int(x) for x in row))
    return tuple(out)


def integer_inverse(P):
    inv = rational_inverse(P)
    return None if inv is None else integral(inv)


def elementary_divisors(rows, ncols):
    """Nonzero elementary divisors of an integer matrix, ascending."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return ()
    factors = invariant_factors(Matrix(rows), domain=ZZ)
    return tuple(sorted(abs(int(f)) for f in factors if f != 0))


def is_saturated(columns):
    """True when the given integer vectors extend to a basis of Z^n."""
    k = len(columns)
    if k == 0:
        return True
    n = len(columns[0])
    g = 0
    for rows in combinations(range(n), k):
        g = gcd(g, det([[col[r] for col in columns] for r in rows]))
        if g == 1:
            return True
    return False
