"""Searching for and classifying graded ring isomorphisms between Bott rings.

Searches
--------
``qtrivial_search``
    Complete for Q-trivial rings: an isomorphism permutes the square-zero
    classes X up to sign, and X spans H^2 rationally, so each signed bijection
    pins down at most one candidate.
``bounded_search``
    Column-by-column backtracking over images with bounded coefficients.
``stratified_isomorphisms``
    Complete enumeration for arbitrary towers.  On well-ordered towers every
    isomorphism is t-stable, so it is block upper-triangular: a Q-trivial part
    on the first t stages, an isomorphism of the quotient towers on the rest,
    and an off-diagonal block that the relations determine linearly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import intmat
from .candidate import (
    IsoCandidate, certify, compose, inverse, is_stable, iso_check,
)
from .errors import (
    DimensionMismatch, InternalInvariantViolation, NotQTrivial, NotWellOrdered,
    ObstructionNonzero, UnmatchedForm, WrongShape, WrongStage,
)
from .invariants import fingerprint, is_q_trivial, is_well_ordered, square_vanishing_set
from .moves import MoveTrace, bundle_change, stage_swap, well_order
from .ring import BottMatrix, alpha, canonical_sign, h2_pairs, h2_product, h2_square

ISO, NON_ISO, UNKNOWN = "ISO", "NON_ISO", "UNKNOWN"


@dataclass(frozen=True)
class IsoVerdict:
    status: str
    candidate: IsoCandidate | None = None
    reason: str | None = None
    bound: int | None = None
    diffeomorphic: bool | None = None

    def to_json(self):
        out = {"status": self.status}
        if self.candidate is not None:
            out["certificate"] = self.candidate.to_json()
        if self.reason is not None:
            out["reason"] = self.reason
        if self.bound is not None:
            out["bound"] = self.bound
        if self.diffeomorphic is not None:
            out["diffeomorphic"] = self.diffeomorphic
        return out

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _same_n(A, B):
    if A.n != B.n:
        raise DimensionMismatch(f"{A.n}-stage vs {B.n}-stage tower")


def fingerprint_witness(A, B):
    """First fingerprint field separating ``A`` from ``B``, or None."""
    return fingerprint(A).first_difference(fingerprint(B))


# Q-trivial rings

def qtrivial_isomorphisms(A, B):
    """Every isomorphism H*(A) -> H*(B) of Q-trivial rings, in a fixed order."""
    _same_n(A, B)
    if not (is_q_trivial(A) and is_q_trivial(B)):
        raise NotQTrivial("both towers must be Q-trivial")
    n = A.n
    XA = square_vanishing_set(A).elements
    XB = square_vanishing_set(B).elements
    # columns of XA_inv solve P @ XA[i] = image of XA[i]
    XA_inv = intmat.rational_inverse(intmat.transpose(XA))
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            Y = intmat.transpose([tuple(s * c for c in XB[p]) for p, s in zip(perm, signs)])
            P = intmat.integral(
                [[sum(Fraction(y) * q for y, q in zip(row, col)) for col in zip(*XA_inv)]
                 for row in Y]
            )
            if P is None:
                continue
            c = IsoCandidate(A, B, P)
            if iso_check(c):
                yield certify(c)


def qtrivial_search(A, B):
    for c in qtrivial_isomorphisms(A, B):
        return IsoVerdict(ISO, c)
    return IsoVerdict(NON_ISO, reason="exhausted-complete-family")


# Bounded backtracking

@lru_cache(maxsize=64)
def _grid(n, bound, support, dtype=object):
    rng = range(-bound, bound + 1)
    rows = [v + (0,) * (n - support) for v in itertools.product(rng, repeat=support) if any(v)]
    return np.array(rows, dtype=dtype)


def _relation_filter(B, gamma, bound, support):
    """Grid vectors ``v`` with ``v^2 = gamma v`` in H*(B)."""
    m = max(B.max_abs_entry(), 1)
    g = max(map(abs, gamma), default=0) + 1
    # every intermediate below is at most this in absolute value
    exact = (2 + m) * bound * bound + (2 + m) * g * bound < 2**62
    cands = _grid(B.n, bound, support, np.int64 if exact else object)
    keep = np.ones(len(cands), dtype=bool)
    for a, b in h2_pairs(B.n):
        A_ab = B.columns[b][a]
        va, vb = cands[:, a], cands[:, b]
        sq = 2 * va * vb + A_ab * vb * vb
        pr = gamma[a] * vb + gamma[b] * va + A_ab * gamma[b] * vb
        keep &= np.asarray(sq == pr, dtype=bool)
    return [tuple(int(x) for x in row) for row in cands[keep]]


def _bounded_wo(A, B, bound):
    """First isomorphism with entries in [-bound, bound] between well-ordered towers."""
    n = A.n
    XA = square_vanishing_set(A)
    t = XA.t
    XB = square_vanishing_set(B).as_set()
    # X element of stage j (j <= t) only involves x_1..x_j
    xa_by_stage = dict(zip(XA.stages, XA.elements))

    def rec(cols):
        j = len(cols) + 1
        if j > n:
            c = IsoCandidate.from_columns(A, B, cols)
            return certify(c) if iso_check(c) else None
        gamma = [0] * n
        for i, a in enumerate(alpha(A, j)[: j - 1]):
            if a:
                for r in range(n):
                    gamma[r] += a * cols[i][r]
        support = t if j <= t else n
        for v in _relation_filter(B, gamma, bound, support):
            nxt = cols + [v]
            if not intmat.is_saturated(nxt):
                continue
            if j <= t:
                z = xa_by_stage[j]
                image = tuple(sum(z[i] * nxt[i][r] for i in range(j)) for r in range(n))
                if canonical_sign(image) not in XB:
                    continue
            found = rec(nxt)
            if found is not None:
                return found
        return None

    return rec([])


def _well_ordered_pair(A, B):
    ta, tb = well_order(A), well_order(B)
    return ta, tb


def _pull_back(c, ta, tb):
    """Turn an isomorphism between well-ordered forms into one between the originals."""
    return compose(inverse(tb.iso()), compose(c, ta.iso()))


def bounded_search(A, B, coeff_bound):
    _same_n(A, B)
    field = fingerprint_witness(A, B)
    if field is not None:
        return IsoVerdict(NON_ISO, reason=field)
    ta, tb = _well_ordered_pair(A, B)
    c = _bounded_wo(ta.end, tb.end, coeff_bound)
    if c is None:
        return IsoVerdict(UNKNOWN, reason="search-bound-exhausted", bound=coeff_bound)
    return IsoVerdict(ISO, _pull_back(c, ta, tb), bound=coeff_bound)


# Complete search via the t-stable block structure

def truncate(M, k):
    """Tower of the first ``k`` stages."""
    return BottMatrix(k, M.columns[:k])


def quotient(M, k):
    """Tower of stages ``k+1..n`` modulo the ideal generated by ``x_1..x_k``."""
    return BottMatrix(M.n - k, tuple(tuple(col[k:]) for col in M.columns[k:]))


def _lift(A, B, t, T, Q):
    """Extend block isomorphisms ``T`` (first t stages) and ``Q`` (quotient) to
    one H*(A) -> H*(B), or return None when no integral extension exists."""
    n = A.n
    cols = [tuple(T.image(j)) + (0,) * (n - t) for j in range(1, t + 1)]
    pairs = h2_pairs(n)
    pos = {p: i for i, p in enumerate(pairs)}
    for j in range(t + 1, n + 1):
        upper = (0,) * t + Q.image(j - t)
        gamma = [0] * n
        for i, a in enumerate(alpha(A, j)[: j - 1]):
            if a:
                for r in range(n):
                    gamma[r] += a * cols[i][r]
        residual = [s - p for s, p in zip(h2_square(B, upper), h2_product(B, gamma, upper))]
        # the (a, k) component is residual + w_a (2 l_k - gamma_k) for a < t <= k
        k = next((k for k in range(t, n) if 2 * upper[k] - gamma[k]), None)
        if k is None:
            raise InternalInvariantViolation("quotient images are linearly dependent")
        coef = 2 * upper[k] - gamma[k]
        w = []
        for a in range(t):
            num = -residual[pos[(a, k)]]
            if num % coef:
                return None
            w.append(num // coef)
        v = tuple(w) + upper[t:]
        if any(x - y for x, y in zip(h2_square(B, v), h2_product(B, gamma, v))):
            return None
        cols.append(v)
    c = IsoCandidate.from_columns(A, B, cols)
    return certify(c) if iso_check(c) else None


def _stratified_wo(A, B):
    tA = square_vanishing_set(A).t
    tB = square_vanishing_set(B).t
    if tA != tB:
        return
    t = tA
    if t == A.n:
        yield from qtrivial_isomorphisms(A, B)
        return
    lower = list(qtrivial_isomorphisms(truncate(A, t), truncate(B, t)))
    if not lower:
        return
    upper = list(stratified_isomorphisms(quotient(A, t), quotient(B, t)))
    for T in lower:
        for Q in upper:
            c = _lift(A, B, t, T, Q)
            if c is not None:
                yield c


def stratified_isomorphisms(A, B):
    """All isomorphisms H*(A) -> H*(B); the inputs need not be well-ordered."""
    _same_n(A, B)
    ta, tb = _well_ordered_pair(A, B)
    for c in _stratified_wo(ta.end, tb.end):
        yield _pull_back(c, ta, tb)


def stratified_search(A, B):
    _same_n(A, B)
    for c in stratified_isomorphisms(A, B):
        return IsoVerdict(ISO, c)
    return IsoVerdict(NON_ISO, reason="exhausted-stratified-family")


def are_isomorphic(A, B, budget=3, method="auto"):
    """Decide whether H*(A) and H*(B) are isomorphic graded rings.

    ``method="auto"`` falls back to the complete stratified search when the
    bounded search is inconclusive; ``method="bounded"`` reports UNKNOWN instead.
    """
    _same_n(A, B)
    label = A.n <= 4
    ta, tb = _well_ordered_pair(A, B)
    Aw, Bw = ta.end, tb.end
    field = fingerprint_witness(Aw, Bw)
    if field is not None:
        return IsoVerdict(NON_ISO, reason=field, diffeomorphic=False)
    if is_q_trivial(Aw):
        verdict = qtrivial_search(Aw, Bw)
    else:
        c = _bounded_wo(Aw, Bw, budget)
        if c is not None:
            verdict = IsoVerdict(ISO, c, bound=budget)
        elif method == "bounded":
            return IsoVerdict(UNKNOWN, reason="search-bound-exhausted", bound=budget)
        else:
            verdict = stratified_search(Aw, Bw)
    if verdict.status == ISO:
        c = _pull_back(verdict.candidate, ta, tb)
        return IsoVerdict(ISO, c, bound=verdict.bound, diffeomorphic=True if label else None)
    return IsoVerdict(NON_ISO, reason=verdict.reason, diffeomorphic=False)


# The four-stage case analysis

@dataclass(frozen=True)
class CaseTag:
    kind: str  # Q_TRIVIAL | STABLE | CASE1 | CASE2 | CASE3_EXCEPTIONAL
    k: int | None = None
    b: int | None = None
    trace: MoveTrace | None = None
    residual: IsoCandidate | None = None

    def to_json(self):
        out = {"kind": self.kind}
        if self.k is not None:
            out["k"] = self.k
        if self.b is not None:
            out["b"] = self.b
        if self.trace is not None:
            out["trace"] = self.trace.to_json()
        if self.residual is not None:
            out["residual"] = self.residual.to_json()
        return out


def classify_iso_n4(c):
    if c.n != 4:
        raise WrongStage(f"case analysis is for four-stage towers, got n={c.n}")
    c = certify(c)
    A, B = c.source, c.target
    if not (is_well_ordered(A) and is_well_ordered(B)):
        raise NotWellOrdered("both towers must be well-ordered")
    if is_q_trivial(A) and is_q_trivial(B):
        return CaseTag("Q_TRIVIAL")
    t = square_vanishing_set(A).t
    if t == 3:
        return CaseTag("STABLE", k=3)
    if t != 2 or not is_stable(c, 2):
        raise InternalInvariantViolation(f"unexpected square-zero count {t} or non-2-stable map")
    y3, y4 = c.P[2][2], c.P[3][2]
    a, b = A.entry(3, 4), B.entry(3, 4)
    if y4 == 0:
        if abs(y3) != 1:
            raise UnmatchedForm(f"phi(x_3) has y_3-coefficient {y3}")
        return CaseTag("CASE1", trace=MoveTrace(B, (), B), residual=c)
    if abs(y4) == 1:
        if b % 2 or (a - b) % 2:
            raise InternalInvariantViolation(f"CASE 2 needs even b and a = b mod 2 (a={a}, b={b})")
        moves = []
        N = B
        if b != 0:
            u = (0, 0, b // 2, 0)
            try:
                N, mv = bundle_change(N, 4, u)
            except ObstructionNonzero as exc:
                raise InternalInvariantViolation(f"CASE 2 bundle change blocked: {exc}") from exc
            moves.append(mv)
        N, mv = stage_swap(N, 3)
        moves.append(mv)
        trace = MoveTrace(B, tuple(moves), N)
        residual = compose(trace.iso(), c)
        if not is_stable(residual, 3):
            raise InternalInvariantViolation("CASE 2 reduction did not produce a 3-stable map")
        return CaseTag("CASE2", b=b, trace=trace, residual=residual)
    if abs(y4) == 2:
        if abs(a) != 1 or abs(b) != 1:
            raise InternalInvariantViolation(f"CASE 3 needs |a| = |b| = 1 (a={a}, b={b})")
        return CaseTag("CASE3_EXCEPTIONAL")
    raise UnmatchedForm(f"phi(x_3) has y_4-coefficient {y4}")


def exceptional_automorphisms(M):
    """The four exceptional automorphisms of a tower with alpha_4 = x_3 - alpha_3/2."""
    if M.n != 4:
        raise WrongShape("needs a four-stage tower")
    a3 = alpha(M, 3)
    if M.entry(3, 4) != 1 or any(c % 2 for c in a3):
        raise WrongShape("needs A^3_4 = 1 and alpha_3 even")
    h = tuple(c // 2 for c in a3)
    if any(M.entry(i, 4) != -h[i - 1] for i in (1, 2)):
        raise WrongShape("needs alpha_4 = x_3 - alpha_3/2")
    e1, e2, e3, e4 = ((0,) * i + (1,) + (0,) * (3 - i) for i in range(4))

    def comb(*terms):
        return tuple(sum(k * v[r] for k, v in terms) for r in range(4))

    x3_plus = comb((2, e4), (-1, e3), (1, a3))
    x3_minus = comb((-2, e4), (1, e3))
    images = [
        (x3_plus, e4),
        (x3_plus, comb((1, e4), (-1, e3), (1, h))),
        (x3_minus, comb((-1, e4),)),
        (x3_minus, comb((-1, e4), (1, e3), (-1, h))),
    ]
    out = []
    for x3, x4 in images:
        c = IsoCandidate.from_columns(M, M, [e1, e2, x3, x4])
        if not iso_check(c):
            raise InternalInvariantViolation("exceptional automorphism failed the relation check")
        out.append(certify(c))
    return out
