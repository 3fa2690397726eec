"""Named towers and instance generators shared by the CLI self-check and tests."""

import random

from .candidate import compose, inverse
from .moves import MoveTrace, neighbors, stage_swap
from .ring import BottMatrix

# alpha_2 = x_1, alpha_3 = 2 x_2, alpha_4 = x_3 - x_2 = x_3 - alpha_3 / 2
M_STAR = BottMatrix.from_columns([[1], [0, 2], [0, -1, 1]])


def sigma(a):
    return BottMatrix.hirzebruch(a)


def _random_bundle_moves(M, rng, stages, steps, u_bound, keep=None):
    moves = []
    for _ in range(steps):
        options = [
            (N, mv) for N, mv in neighbors(M, u_bound)
            if mv.kind == "bundle" and mv.j in stages and (keep is None or keep(N))
        ]
        if not options:
            break
        M, mv = rng.choice(options)
        moves.append(mv)
    return M, moves


def case2_instance(rng=None, u_bound=1):
    """A verified isomorphism between well-ordered four-stage towers that falls
    under the second case (phi(x_3) has y_4-coefficient +-1).

    Built forwards: take alpha_3 = k alpha_4 with alpha_4 in H^2(B_2) of nonzero
    square and A^3_4 = 0, swap stages 3 and 4, then apply random bundle changes
    on the target side and on the source side.
    Returns ``(source, target, iso)``.
    """
    rng = rng or random.Random()
    while True:
        a2 = rng.randint(-2, 2)
        p, q = rng.randint(-2, 2), rng.randint(-2, 2)
        if q * q * a2 + 2 * p * q != 0:
            break
    k = rng.choice([-2, -1, 1, 2])
    A = BottMatrix.from_columns([[a2], [k * p, k * q], [p, q, 0]])
    B, swap = stage_swap(A, 3)
    B, after = _random_bundle_moves(B, rng, (2, 3, 4), rng.randint(0, 3), u_bound)
    forward = MoveTrace(A, (swap, *after), B)
    # source-side moves must keep stages 3 and 4 swappable
    S, before = _random_bundle_moves(
        A, rng, (2, 3, 4), rng.randint(0, 2), u_bound, keep=lambda N: N.entry(3, 4) == 0
    )
    back = inverse(MoveTrace(A, tuple(before), S).iso())
    return S, B, compose(forward.iso(), back)
