import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from frobsys.cmhodge import (CMError, CMField, CMType, EHodgeType, cm_type_hodge,
                             find_compatible_cm_type, format_cycles, half_twist,
                             half_twist_ladder, hodge_type_from_slots, level, parse_cycles,
                             parse_index_list, parse_slots, top_set, upper_set)

F4 = parse_cycles("(0 2)(1 3)")
V1 = hodge_type_from_slots(F4, {0: (1, 0), 1: (1, 0), 2: (0, 1), 3: (0, 1)})


def random_hodge_type(rng: random.Random, g: int, weight: int, field=None) -> EHodgeType:
    F = field or CMField.standard(g)
    slots = {}
    for a, b in F.pairs():
        p = rng.randint(0, weight)
        slots[a], slots[b] = (p, weight - p), (weight - p, p)
    return EHodgeType(F, weight, slots)


def random_involution(rng: random.Random, g: int) -> CMField:
    idx = list(range(2 * g))
    rng.shuffle(idx)
    perm = [0] * (2 * g)
    for a, b in zip(idx[::2], idx[1::2]):
        perm[a], perm[b] = b, a
    return CMField(2 * g, tuple(perm))


# --- types -------------------------------------------------------------------

def test_cm_field_validation():
    with pytest.raises(CMError):
        CMField(3, (1, 2, 0))
    with pytest.raises(CMError):
        CMField(2, (0, 1))           # fixed points
    with pytest.raises(CMError):
        CMField(4, (1, 2, 3, 0))     # not an involution


@pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
def test_cm_type_count(g):
    F = CMField.standard(g)
    valid = 0
    for r in range(2 * g + 1):
        for subset in itertools.combinations(range(2 * g), r):
            try:
                CMType(F, frozenset(subset))
            except CMError:
                continue
            valid += 1
    assert valid == 2 ** g == len(F.cm_types())


def test_hodge_type_validation():
    with pytest.raises(CMError):
        EHodgeType(F4, 1, {0: (1, 0), 1: (1, 0), 2: (0, 1), 3: (1, 0)})   # conjugation
    with pytest.raises(CMError):
        EHodgeType(F4, 2, {0: (1, 0), 1: (1, 0), 2: (0, 1), 3: (0, 1)})   # weight


# --- level, upper set, CM-type Hodge structures ---------------------------------

def test_level_examples():
    assert level(V1) == 1
    assert level(hodge_type_from_slots(F4, {s: (1, 1) for s in range(4)})) == 0
    F2 = CMField.standard(1)
    assert level(hodge_type_from_slots(F2, {0: (2, 0), 1: (0, 2)})) == 2


def test_upper_set_examples():
    F2 = CMField.standard(1)
    assert upper_set(hodge_type_from_slots(F2, {0: (1, 0), 1: (0, 1)})) == {0}
    assert upper_set(hodge_type_from_slots(F4, {s: (0, 0) for s in range(4)})) == {0, 1, 2, 3}
    W = hodge_type_from_slots(F4, {0: (2, 0), 1: (1, 1), 2: (0, 2), 3: (1, 1)})
    assert upper_set(W) == {0, 1, 3}


def test_cm_type_hodge():
    F2 = CMField.standard(1)
    H = cm_type_hodge(CMType(F2, frozenset({0})))
    assert H.slots() == {0: (1, 0), 1: (0, 1)}
    for g in (1, 2, 3):
        for phi in CMField.standard(g).cm_types():
            H = cm_type_hodge(phi)
            assert level(H) == 1 and upper_set(H) == phi.phi and H.weight == 1


# --- half-twists -----------------------------------------------------------------

def test_half_twist_example():
    W = half_twist(V1, CMType(F4, frozenset({2, 3})))
    assert W.slots() == {s: (1, 1) for s in range(4)}
    assert W.weight == 2 and level(W) == 0


def test_half_twist_preconditions():
    with pytest.raises(CMError, match="T meets"):
        half_twist(V1, CMType(F4, frozenset({0, 1})))
    flat = hodge_type_from_slots(F4, {s: (1, 1) for s in range(4)})
    with pytest.raises(CMError, match="level 0"):
        half_twist(flat, CMType(F4, frozenset({0, 1})))
    with pytest.raises(CMError):
        half_twist(V1, CMType(parse_cycles("(0 1)(2 3)"), frozenset({1, 3})))


def test_find_compatible_examples():
    F2 = CMField.standard(1)
    V = hodge_type_from_slots(F2, {0: (1, 0), 1: (0, 1)})
    assert find_compatible_cm_type(V).phi == {1}
    mid = hodge_type_from_slots(F4, {0: (2, 0), 2: (0, 2), 1: (1, 1), 3: (1, 1)})
    assert find_compatible_cm_type(mid) is None
    assert find_compatible_cm_type(V1).phi == {2, 3}


def test_ladder_examples():
    flat = hodge_type_from_slots(F4, {s: (1, 1) for s in range(4)})
    assert half_twist_ladder(flat) == []
    steps = half_twist_ladder(V1)
    assert len(steps) == 1 and steps[0].result.slots() == {s: (1, 1) for s in range(4)}
    F2 = CMField.standard(1)
    steps = half_twist_ladder(hodge_type_from_slots(F2, {0: (2, 0), 1: (0, 2)}))
    assert [s.result.weight for s in steps] == [3, 4]
    assert [level(s.result) for s in steps] == [1, 0]
    assert all(s.strict for s in steps)


def test_ladder_through_middle_slot():
    # even weight with a (1,1) slot: T meets its conjugate, the top-set rule applies
    V = hodge_type_from_slots(F4, {0: (2, 0), 2: (0, 2), 1: (1, 1), 3: (1, 1)})
    steps = half_twist_ladder(V)
    assert len(steps) == 2 and not steps[0].strict
    assert level(steps[-1].result) == 0


# --- random properties ------------------------------------------------------------

def test_random_half_twist_law():
    rng = random.Random(2025)
    checked = 0
    while checked < 500:
        g = rng.randint(1, 5)
        F = random_involution(rng, g)
        V = random_hodge_type(rng, g, rng.randint(1, 6), F)
        if level(V) < 1:
            continue
        phi = find_compatible_cm_type(V)
        if phi is None:
            phi_s = next(p for p in F.cm_types() if not (p.phi & top_set(V)))
            W = half_twist(V, phi_s, strict=False)
        else:
            assert not (upper_set(V) & phi.phi)
            W = half_twist(V, phi)
        assert W.weight == V.weight + 1 and level(W) == level(V) - 1
        checked += 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.integers(0, 7), st.randoms(use_true_random=False))
def test_ladder_length_equals_level(g, weight, rnd):
    V = random_hodge_type(rnd, g, weight)
    steps = half_twist_ladder(V)
    assert len(steps) == level(V)
    w = V.weight
    for st_ in steps:
        w += 1
        assert st_.result.weight == w
        assert upper_set(cm_type_hodge(st_.phi)) == st_.phi.phi


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.integers(0, 7), st.randoms(use_true_random=False))
def test_compatible_type_avoids_upper_set(g, weight, rnd):
    V = random_hodge_type(rnd, g, weight)
    phi = find_compatible_cm_type(V)
    T = upper_set(V)
    if T & V.field.dag(T):
        assert phi is None
        # the top set never meets its conjugate once the level is positive
        if level(V) > 0:
            S = top_set(V)
            assert not (S & V.field.dag(S)) and S <= T
    else:
        assert phi is not None and not (T & phi.phi)
        # lexicographic choice: the smaller index of each free pair
        for a, b in V.field.pairs():
            if a not in T and b not in T:
                assert a in phi.phi


# --- text encodings ------------------------------------------------------------------

def test_cycle_round_trip():
    F = parse_cycles("(0 3)(1 2)")
    assert F.dagger == (3, 2, 1, 0)
    assert parse_cycles(format_cycles(F)) == F
    with pytest.raises(CMError):
        parse_cycles("(0 1 2)")
    with pytest.raises(CMError):
        parse_cycles("(0 1)(1 2)")
    with pytest.raises(CMError):
        parse_cycles("(0 1)", size=4)


def test_slot_and_index_parsing():
    assert parse_slots("0:(1,0) 1:(0,1)") == {0: (1, 0), 1: (0, 1)}
    assert parse_slots("0:1,0;1:0,1") == {0: (1, 0), 1: (0, 1)}
    assert parse_index_list("{2, 3}") == {2, 3}
    with pytest.raises(CMError):
        hodge_type_from_slots(F4, {0: (1, 0), 1: (2, 0), 2: (0, 1), 3: (0, 2)})
