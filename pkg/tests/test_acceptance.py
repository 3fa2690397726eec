"""Acceptance suite: one PASS/FAIL line per headline criterion.

Lines are collected in ``RESULTS`` and printed in the pytest terminal summary
(see conftest.py).  Running this file directly prints them as well.
"""

import random
import time

from bottring.candidate import is_stable, iso_check
from bottring.census import CensusConfig, classify, dumps_report, verify_report, write_report
from bottring.fixtures import M_STAR, case2_instance
from bottring.invariants import fingerprint, is_q_trivial, square_vanishing_set
from bottring.isomorphism import (
    ISO, NON_ISO, are_isomorphic, classify_iso_n4, exceptional_automorphisms, qtrivial_search,
)
from bottring.moves import MoveTrace, bundle_change, neighbors, replay
from bottring.ring import BottMatrix

from oracles import brute_isomorphism, brute_square_zero, random_matrix

RESULTS = []

# pinned budgets
HIRZEBRUCH_SECONDS = 1.0
FIXTURE_SECONDS = 1.0
CENSUS_N4_SECONDS = 600.0
SQUARE_ZERO_COEFF_BOUND = 10
QTRIVIAL_BRUTE_BOUND = 6


def record(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_hirzebruch_classification():
    S = BottMatrix.hirzebruch
    bad = []
    started = time.perf_counter()
    for a in range(-5, 6):
        for b in range(-5, 6):
            v = are_isomorphic(S(a), S(b))
            if (a - b) % 2 == 0:
                k = (a - b) // 2
                N, move = bundle_change(S(a), 2, (k,))
                trace = replay(MoveTrace(S(a), (move,), N).to_json())
                ok = v.status == ISO and iso_check(v.candidate) and trace.end == S(b)
            else:
                ok = v.status == NON_ISO and v.reason == "spanIndex"
            if not ok:
                bad.append((a, b))
    elapsed = time.perf_counter() - started
    record(
        "hirzebruch-classification",
        not bad and elapsed < HIRZEBRUCH_SECONDS,
        f"121 pairs, {len(bad)} wrong, {elapsed:.3f}s (budget {HIRZEBRUCH_SECONDS}s)",
    )


def test_exceptional_fixtures():
    started = time.perf_counter()
    phis = exceptional_automorphisms(M_STAR)
    kinds = [classify_iso_n4(p).kind for p in phis]
    ok = len(phis) == 4 and all(iso_check(p) for p in phis)
    ok = ok and kinds == ["CASE3_EXCEPTIONAL"] * 4
    elapsed = time.perf_counter() - started
    record(
        "exceptional-fixtures",
        ok and elapsed < FIXTURE_SECONDS,
        f"kinds {kinds}, {elapsed:.3f}s (budget {FIXTURE_SECONDS}s)",
    )


def _up_to_sign(vectors):
    return {min(v, tuple(-x for x in v)) for v in vectors}


def test_square_vanishing_oracle():
    rng = random.Random(20261018)
    mismatches = 0
    for _ in range(500):
        M = random_matrix(rng, rng.randint(1, 4), 2)
        got = _up_to_sign(square_vanishing_set(M).elements)
        mismatches += got != _up_to_sign(brute_square_zero(M, SQUARE_ZERO_COEFF_BOUND))
    record(
        "square-vanishing-oracle",
        mismatches == 0,
        f"500 matrices, coefficients in [-{SQUARE_ZERO_COEFF_BOUND}, {SQUARE_ZERO_COEFF_BOUND}], "
        f"{mismatches} mismatches",
    )


def test_move_soundness():
    rng = random.Random(7)
    moves = failures = 0
    while moves < 1000:
        M = random_matrix(rng, rng.randint(2, 5), 2)
        fp = fingerprint(M)
        steps = []
        for _ in range(5):
            N, mv = rng.choice(neighbors(M, 2))
            moves += 1
            steps.append(mv)
            failures += not iso_check(mv.iso) or fingerprint(N) != fp
            M = N
        trace = MoveTrace(steps[0].source, tuple(steps), M)
        failures += not iso_check(trace.iso())
    record("move-soundness", failures == 0, f"{moves} moves, {failures} failures")


def _random_q_trivial(rng, n):
    while True:
        M = random_matrix(rng, n, 2)
        if is_q_trivial(M):
            return M


def test_qtrivial_completeness():
    rng = random.Random(99)
    disagreements = iso_pairs = 0
    started = time.perf_counter()
    for _ in range(200):
        n = rng.randint(2, 4)
        A = _random_q_trivial(rng, n)
        B = _random_q_trivial(rng, n)
        if rng.random() < 0.5:
            # bias towards isomorphic pairs with a short walk that keeps entries <= 2
            for _ in range(3):
                options = [N for N, _ in neighbors(B, 2) if N.max_abs_entry() <= 2]
                B = rng.choice(options) if options else B
        v = qtrivial_search(A, B)
        brute = brute_isomorphism(A, B, QTRIVIAL_BRUTE_BOUND)
        agree = (v.status == ISO) == (brute is not None)
        if v.status == ISO:
            agree = agree and iso_check(v.candidate)
            iso_pairs += 1
        disagreements += not agree
    elapsed = time.perf_counter() - started
    record(
        "qtrivial-completeness",
        disagreements == 0,
        f"200 pairs ({iso_pairs} isomorphic), brute bound {QTRIVIAL_BRUTE_BOUND}, "
        f"{disagreements} disagreements, {elapsed:.1f}s",
    )


def test_case2_reduction():
    rng = random.Random(50)
    failures = 0
    for _ in range(50):
        _, _, phi = case2_instance(rng)
        tag = classify_iso_n4(phi)
        failures += tag.kind != "CASE2" or not is_stable(tag.residual, 3)
    record("case2-reduction", failures == 0, f"50 instances, {failures} failures")


def test_census_determinism(tmp_path):
    notes = []
    ok = True
    for n in (3, 4):
        started = time.perf_counter()
        serial = classify(CensusConfig(n, 1, workers=1))
        elapsed = time.perf_counter() - started
        parallel = classify(CensusConfig(n, 1, workers=4))
        same = dumps_report(serial) == dumps_report(parallel)
        path = tmp_path / f"census{n}.jsonl"
        write_report(serial, path)
        verified = verify_report(path)
        ok = ok and same and verified
        if n == 4:
            ok = ok and elapsed < CENSUS_N4_SECONDS
        stats = serial["trailer"]["stats"]
        notes.append(f"n={n}: {stats['classes']} classes, identical={same}, verified={verified}, "
                     f"{elapsed:.1f}s")
    two = classify(CensusConfig(2, 3))["trailer"]["stats"]["classes"]
    ok = ok and two == 2
    notes.append(f"n=2,c=3: {two} classes")
    record("census-determinism", ok, "; ".join(notes) + f" (n=4 budget {CENSUS_N4_SECONDS:.0f}s)")


if __name__ == "__main__":
    import pathlib
    import tempfile

    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                if name == "test_census_determinism":
                    with tempfile.TemporaryDirectory() as d:
                        fn(pathlib.Path(d))
                else:
                    fn()
            except AssertionError:
                pass
