"""Rewrites of Bott matrices that come from diffeomorphisms of the manifold.

Two moves are available:

* ``stage_swap(M, j)`` exchanges stages ``j`` and ``j + 1`` when ``A^j_{j+1} = 0``;
  the induced map swaps ``x_j`` and ``x_{j+1}``.
* ``bundle_change(M, j, u)`` replaces ``alpha_j`` by ``alpha_j - 2u`` when ``u``
  lives below stage ``j`` and ``u (u - alpha_j) = 0``.  The new generator
  ``y_j`` corresponds to ``x_j - u``; later twists are rewritten accordingly.

Every move carries the isomorphism H*(source) -> H*(target) it induces, and that
map is checked with :func:`iso_check` before the move is returned.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import intmat
from .candidate import IsoCandidate, certify, compose, identity, iso_check
from .errors import (
    BadSupport, BottError, IndexOutOfRange, InternalInvariantViolation,
    ObstructionNonzero, SwapObstructed,
)
from .invariants import square_zero_stages
from .ring import BottMatrix, alpha, h2_product, validate, vec_sub


@dataclass(frozen=True)
class Move:
    kind: str  # "swap" or "bundle"
    j: int
    u: tuple | None
    source: BottMatrix
    target: BottMatrix
    iso: IsoCandidate

    def to_json(self):
        step = {"kind": self.kind, "j": self.j}
        if self.u is not None:
            step["u"] = list(self.u)
        return step


def _verified(c, what):
    if not iso_check(c):
        raise InternalInvariantViolation(f"{what} produced a map that is not a ring isomorphism")
    return certify(c)


def stage_swap(M, j):
    if not 1 <= j < M.n:
        raise IndexOutOfRange(f"cannot swap stages {j} and {j + 1} of a {M.n}-stage tower")
    if M.entry(j, j + 1) != 0:
        raise SwapObstructed(f"A^{j}_{j + 1} = {M.entry(j, j + 1)} is nonzero")
    sigma = list(range(M.n + 1))
    sigma[j], sigma[j + 1] = j + 1, j
    cols = []
    for k in range(1, M.n + 1):
        cols.append(tuple(
            0 if {i, k} == {j, j + 1} else M.entry(min(sigma[i], sigma[k]), max(sigma[i], sigma[k]))
            for i in range(1, k)
        ))
    N = BottMatrix(M.n, tuple(cols))
    P = [list(row) for row in intmat.identity(M.n)]
    P[j - 1][j - 1] = P[j][j] = 0
    P[j - 1][j] = P[j][j - 1] = 1
    iso = _verified(IsoCandidate(M, N, P), "stage_swap")
    return N, Move("swap", j, None, M, N, iso)


def _pad(M, j, u):
    u = tuple(int(c) for c in u)
    if len(u) == j - 1:
        u = u + (0,) * (M.n - j + 1)
    if len(u) != M.n:
        raise BadSupport(f"u must have length {j - 1} or {M.n}")
    if any(u[j - 1:]):
        raise BadSupport(f"u must be supported on indices below {j}")
    return u


def bundle_obstruction(M, j, u):
    """``u (u - alpha_j)`` in H^4; zero exactly when the bundle change is allowed."""
    return h2_product(M, u, vec_sub(u, alpha(M, j)))


def bundle_change(M, j, u):
    if not 1 <= j <= M.n:
        raise IndexOutOfRange(f"stage {j} outside 1..{M.n}")
    u = _pad(M, j, u)
    if any(bundle_obstruction(M, j, u)):
        raise ObstructionNonzero(f"u(u - alpha_{j}) does not vanish for u = {list(u)}")
    cols = [list(c) for c in M.columns]
    cols[j - 1] = [a - 2 * u[i] for i, a in enumerate(cols[j - 1])]
    for k in range(j + 1, M.n + 1):
        ajk = M.entry(j, k)
        for i in range(j - 1):
            cols[k - 1][i] += ajk * u[i]
    N = BottMatrix(M.n, tuple(tuple(c) for c in cols))
    P = [list(row) for row in intmat.identity(M.n)]
    for i in range(j - 1):
        P[i][j - 1] = u[i]
    iso = _verified(IsoCandidate(M, N, P), "bundle_change")
    return N, Move("bundle", j, u, M, N, iso)


def apply_step(M, step):
    kind, j = step["kind"], step["j"]
    if kind == "swap":
        return stage_swap(M, j)
    if kind == "bundle":
        return bundle_change(M, j, step["u"])
    raise BottError(f"unknown move kind {kind!r}")


@dataclass(frozen=True)
class MoveTrace:
    start: BottMatrix
    steps: tuple
    end: BottMatrix

    def iso(self):
        """Composite isomorphism H*(start) -> H*(end)."""
        c = identity(self.start)
        for move in self.steps:
            c = compose(move.iso, c)
        return c

    def then(self, other):
        if self.end != other.start:
            raise InternalInvariantViolation("traces do not chain")
        return MoveTrace(self.start, self.steps + other.steps, other.end)

    def to_json(self):
        return {
            "start": self.start.to_json(),
            "steps": [m.to_json() for m in self.steps],
            "end": self.end.to_json(),
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def replay(obj):
    """Re-run a serialized trace, re-checking every precondition and the endpoint.

    Returns the rebuilt :class:`MoveTrace`; raises on any failure.
    """
    M = validate(obj["start"])
    start, moves = M, []
    for step in obj["steps"]:
        M, move = apply_step(M, step)
        moves.append(move)
    end = validate(obj["end"])
    if M != end:
        raise InternalInvariantViolation("replayed trace does not reach the recorded end matrix")
    return MoveTrace(start, tuple(moves), end)


def well_order(M):
    """Bubble square-zero stages to the front using stage swaps."""
    moves = []
    start = M
    while True:
        zero = set(square_zero_stages(M))
        j = next((j for j in range(1, M.n) if j not in zero and j + 1 in zero), None)
        if j is None:
            return MoveTrace(start, tuple(moves), M)
        if M.entry(j, j + 1) != 0:
            raise InternalInvariantViolation(
                f"stage {j + 1} squares to zero after a non-square-zero stage but A^{j}_{j + 1} != 0"
            )
        M, move = stage_swap(M, j)
        moves.append(move)


def neighbors(M, u_bound):
    """All single moves out of ``M`` with |u_i| <= u_bound, in a fixed order."""
    out = []
    for j in range(1, M.n):
        if M.entry(j, j + 1) == 0:
            out.append(stage_swap(M, j))
    rng = range(-u_bound, u_bound + 1)
    for j in range(2, M.n + 1):
        for low in itertools.product(rng, repeat=j - 1):
            if not any(low):
                continue
            u = low + (0,) * (M.n - j + 1)
            if any(bundle_obstruction(M, j, u)):
                continue
            out.append(bundle_change(M, j, u))
    return out


def _bounded_neighbors(args):
    M, entry_bound, u_bound = args
    return [(N, mv) for N, mv in neighbors(M, u_bound) if N.max_abs_entry() <= entry_bound]


@dataclass
class Closure:
    root: BottMatrix
    parent: dict  # matrix -> Move that first reached it (None for the root)
    saturated: bool

    @property
    def nodes(self):
        return frozenset(self.parent)

    def __contains__(self, M):
        return M in self.parent

    def trace_to(self, M):
        if M not in self.parent:
            return None
        moves = []
        while self.parent[M] is not None:
            move = self.parent[M]
            moves.append(move)
            M = move.source
        return MoveTrace(self.root, tuple(reversed(moves)), moves[0].target if moves else self.root)


def move_closure(M, entry_bound, u_bound, node_cap, workers=1):
    """Breadth-first closure of ``{M}`` under bounded moves.

    Each frontier level is expanded in lexicographic order and merged in that
    order, so the result does not depend on ``workers``.
    """
    if entry_bound < 0 or u_bound < 1 or node_cap < 1:
        raise ValueError("bounds must be positive")
    parent = {M: None}
    frontier = [M]
    saturated = False
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while frontier and not saturated:
            frontier.sort()
            jobs = [(N, entry_bound, u_bound) for N in frontier]
            expanded = (pool.map(_bounded_neighbors, jobs, chunksize=8) if pool
                        else map(_bounded_neighbors, jobs))
            nxt = []
            for found in expanded:
                for N, move in found:
                    if N in parent:
                        continue
                    if len(parent) >= node_cap:
                        saturated = True
                        break
                    parent[N] = move
                    nxt.append(N)
                if saturated:
                    break
            frontier = nxt
    finally:
        if pool:
            pool.shutdown()
    return Closure(M, parent, saturated)
