"""Built-in regression fixtures run by ``bottring paper-check``."""

import random

from .candidate import is_stable, iso_check
from .fixtures import M_STAR, case2_instance, sigma
from .invariants import is_well_ordered
from .isomorphism import ISO, NON_ISO, are_isomorphic, classify_iso_n4, exceptional_automorphisms
from .moves import well_order
from .ring import BottMatrix


def _hirzebruch_parity():
    bad = []
    for a in range(-5, 6):
        for b in range(-5, 6):
            v = are_isomorphic(sigma(a), sigma(b))
            want = ISO if (a - b) % 2 == 0 else NON_ISO
            if v.status != want or (want == NON_ISO and v.reason != "spanIndex"):
                bad.append((a, b))
    return not bad, f"{121 - len(bad)}/121 pairs agree with parity"


def _sigma0_sigma1():
    v = are_isomorphic(sigma(0), sigma(1))
    return v.status == NON_ISO and v.reason == "spanIndex", v.reason


def _exceptional(k):
    def run():
        phi = exceptional_automorphisms(M_STAR)[k - 1]
        tag = classify_iso_n4(phi)
        return iso_check(phi) and tag.kind == "CASE3_EXCEPTIONAL", tag.kind
    return run


def _case2(seeds=10):
    def run():
        rng = random.Random(2024)
        ok = 0
        for _ in range(seeds):
            _, _, phi = case2_instance(rng)
            tag = classify_iso_n4(phi)
            ok += tag.kind == "CASE2" and is_stable(tag.residual, 3)
        return ok == seeds, f"{ok}/{seeds} reduced to 3-stable maps"
    return run


def _well_ordering():
    M4 = BottMatrix.from_columns([[1], [0, 1], [1, 0, 0]])
    trace = well_order(M4)
    ok = not is_well_ordered(M4) and is_well_ordered(trace.end) and [m.j for m in trace.steps] == [3]
    return ok, f"{len(trace.steps)} swap(s)"


FIXTURES = [
    ("hirzebruch-parity", _hirzebruch_parity),
    ("sigma0-vs-sigma1", _sigma0_sigma1),
    *[(f"phi{k}-case3", _exceptional(k)) for k in range(1, 5)],
    ("case2-reduction", _case2()),
    ("well-ordering-swap", _well_ordering),
]


def run_all():
    results = []
    for name, fn in FIXTURES:
        try:
            ok, detail = fn()
        except Exception as exc:  # a fixture crashing is a failure, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), str(detail)))
    return results
