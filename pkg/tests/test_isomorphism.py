import itertools
import json
import random

import pytest

from bottring.candidate import (
    IsoCandidate, compose, identity, inverse, is_stable, iso_check,
)
from bottring.errors import (
    DimensionMismatch, NotQTrivial, NotWellOrdered, Unverified, WrongShape, WrongStage,
)
from bottring.fixtures import M_STAR, case2_instance
from bottring.invariants import square_vanishing_set
from bottring.isomorphism import (
    ISO, NON_ISO, UNKNOWN, are_isomorphic, bounded_search, classify_iso_n4,
    exceptional_automorphisms, qtrivial_isomorphisms, qtrivial_search, stratified_isomorphisms,
)
from bottring.moves import bundle_change, neighbors, stage_swap, well_order
from bottring.ring import BottMatrix

from oracles import all_automorphism_count, brute_isomorphism, random_matrix

S = BottMatrix.hirzebruch
M4 = BottMatrix.from_columns([[1], [0, 1], [1, 0, 0]])


def _max_entry(c):
    return max(abs(x) for row in c.P for x in row)


# iso_check / is_stable

def test_iso_check_examples():
    for M in (S(0), S(3), M4, M_STAR):
        assert iso_check(identity(M))
    assert not iso_check(IsoCandidate(S(0), S(1), ((1, 0), (0, 1))))
    # a ring map that is not invertible
    assert not iso_check(IsoCandidate(S(0), S(0), ((2, 0), (0, 1))))
    assert iso_check(IsoCandidate(S(1), S(3), ((1, -1), (0, 1))))


def test_exceptional_automorphisms_are_not_3_stable():
    phis = exceptional_automorphisms(M_STAR)
    assert len(phis) == 4 and len({p.P for p in phis}) == 4
    for p in phis:
        assert iso_check(p)
        assert is_stable(p, 2) and not is_stable(p, 3)
    with pytest.raises(Unverified):
        is_stable(IsoCandidate(M_STAR, M_STAR, phis[0].P), 2)


def test_exceptional_automorphisms_need_the_right_shape():
    with pytest.raises(WrongShape):
        exceptional_automorphisms(BottMatrix.from_columns([[1], [0, 2], [0, -1, 2]]))
    with pytest.raises(WrongShape):
        exceptional_automorphisms(S(1))


def test_candidate_json_round_trip():
    c = exceptional_automorphisms(M_STAR)[1]
    again = IsoCandidate.from_json(json.loads(c.dumps()))
    assert again.P == c.P and again.source == c.source and iso_check(again)


def test_compose_and_inverse_stay_isomorphisms():
    phis = exceptional_automorphisms(M_STAR)
    for a, b in itertools.product(phis, repeat=2):
        assert iso_check(compose(a, b))
        assert compose(inverse(a), a).P == identity(M_STAR).P


# Q-trivial search

def test_qtrivial_examples():
    v = qtrivial_search(S(1), S(3))
    assert v.status == ISO and iso_check(v.candidate)
    assert qtrivial_search(S(0), S(1)).status == NON_ISO
    assert len(list(qtrivial_isomorphisms(S(0), S(0)))) == 8
    with pytest.raises(NotQTrivial):
        qtrivial_search(M_STAR, M_STAR)
    with pytest.raises(DimensionMismatch):
        qtrivial_search(S(0), BottMatrix.zero(3))


@pytest.mark.parametrize("a", [0, 1, 2, 3, -2])
def test_qtrivial_automorphism_count_matches_brute_force(a):
    # the complete family, cut down to entries in [-2, 2], against an exhaustive scan
    found = [c for c in qtrivial_isomorphisms(S(a), S(a)) if _max_entry(c) <= 2]
    assert len(found) == all_automorphism_count(S(a), 2)


# bounded search

def test_bounded_search_examples():
    v = bounded_search(S(0), S(1), 3)
    assert v.status == NON_ISO and v.reason == "spanIndex"
    v = bounded_search(M_STAR, M_STAR, 3)
    assert v.status == ISO and iso_check(v.candidate)


def test_bounded_search_can_be_inconclusive():
    N, _ = bundle_change(M_STAR, 2, (10,))
    v = bounded_search(M_STAR, N, 3)
    assert v.status == UNKNOWN and v.bound == 3
    assert are_isomorphic(M_STAR, N, method="bounded").status == UNKNOWN
    full = are_isomorphic(M_STAR, N)
    assert full.status == ISO and iso_check(full.candidate)
    assert full.candidate.source == M_STAR and full.candidate.target == N


# are_isomorphic

def test_are_isomorphic_examples():
    v = are_isomorphic(S(1), S(3))
    assert v.status == ISO and v.diffeomorphic is True
    v = are_isomorphic(S(0), S(1))
    assert v.status == NON_ISO and v.reason == "spanIndex" and v.diffeomorphic is False
    N, _ = stage_swap(M4, 3)
    v = are_isomorphic(M4, N)
    assert v.status == ISO and v.candidate.source == M4 and v.candidate.target == N
    assert are_isomorphic(BottMatrix.zero(5), BottMatrix.zero(5)).diffeomorphic is None


def test_are_isomorphic_is_symmetric_and_certified():
    rng = random.Random(12)
    for _ in range(80):
        n = rng.randint(2, 4)
        A, B = random_matrix(rng, n, 2), random_matrix(rng, n, 2)
        ab, ba = are_isomorphic(A, B), are_isomorphic(B, A)
        assert ab.status == ba.status != UNKNOWN
        if ab.status == ISO:
            assert iso_check(ab.candidate) and iso_check(ba.candidate)


def test_found_isomorphisms_are_t_stable_on_well_ordered_towers():
    rng = random.Random(13)
    checked = 0
    while checked < 40:
        A = well_order(random_matrix(rng, rng.randint(2, 4), 2)).end
        t = square_vanishing_set(A).t
        for c in itertools.islice(stratified_isomorphisms(A, A), 20):
            assert is_stable(c, t)
        checked += 1


def test_stratified_search_agrees_with_brute_force():
    rng = random.Random(14)
    for _ in range(60):
        n = rng.randint(2, 3)
        A, B = random_matrix(rng, n, 2), random_matrix(rng, n, 2)
        if rng.random() < 0.5:
            # force a known-isomorphic pair through a random move
            B, _ = rng.choice(neighbors(A, 2))
        found = next(stratified_isomorphisms(A, B), None)
        brute = brute_isomorphism(A, B, 4)
        if brute is not None:
            assert found is not None, (A, B)
        if found is not None:
            assert iso_check(found)


def test_automorphism_counts_match_brute_force_small():
    rng = random.Random(15)
    for _ in range(6):
        M = random_matrix(rng, 3, 1)
        found = [c for c in stratified_isomorphisms(M, M) if _max_entry(c) <= 1]
        assert len(found) == all_automorphism_count(M, 1), M


def test_m_star_automorphisms():
    autos = list(stratified_isomorphisms(M_STAR, M_STAR))
    assert len(autos) == 32 and len({c.P for c in autos}) == 32
    exceptional = {c.P for c in exceptional_automorphisms(M_STAR)}
    assert exceptional <= {c.P for c in autos}


# four-stage case analysis

def test_classify_exceptional():
    for p in exceptional_automorphisms(M_STAR):
        assert classify_iso_n4(p).kind == "CASE3_EXCEPTIONAL"


def test_classify_other_cases():
    Z = BottMatrix.zero(4)
    assert classify_iso_n4(identity(Z)).kind == "Q_TRIVIAL"
    tag = classify_iso_n4(identity(M_STAR))
    assert tag.kind == "CASE1" and tag.trace.steps == () and tag.residual.P == identity(M_STAR).P
    three = BottMatrix.from_columns([[0], [0, 0], [1, 1, 1]])
    assert square_vanishing_set(three).t == 3
    assert classify_iso_n4(identity(three)).kind == "STABLE"


def test_classify_case2_instances():
    rng = random.Random(16)
    for _ in range(20):
        A, B, c = case2_instance(rng)
        tag = classify_iso_n4(c)
        assert tag.kind == "CASE2"
        assert tag.b == B.entry(3, 4)
        assert is_stable(tag.residual, 3)
        assert tag.residual.source == A and tag.residual.target == tag.trace.end


def test_classify_errors():
    with pytest.raises(WrongStage):
        classify_iso_n4(identity(S(1)))
    with pytest.raises(NotWellOrdered):
        classify_iso_n4(identity(M4))
    with pytest.raises(Unverified):
        classify_iso_n4(IsoCandidate(BottMatrix.zero(4), M_STAR, identity(M_STAR).P))
