import itertools
import random
from math import gcd

import mpmath
import pytest

from frobsys.arith import primes_below
from frobsys.frobpoly import CharPoly, power_charpoly, tensor_charpoly
from frobsys.frobtorus import (HEURISTIC, NotSplitError, _candidate_relations, _is_torsion,
                               _rank, _split_exact, rank_compare, torus_rank)
from frobsys.ingest import gaussian_field
from frobsys.numfield import QQ, NumberField, Polynomial
from frobsys.systems import FrobSample, Place

Qi = gaussian_field()
Q7 = NumberField([7, 0, 1], name="Q7", gen_name="u")
i = Qi.gen


def C(*cs, field=QQ):
    return CharPoly.from_coeffs(cs, field)


def from_roots(roots, field=QQ):
    P = Polynomial([1], field)
    for r in roots:
        P = P * Polynomial([-r, 1], field)
    return CharPoly(P)


@pytest.mark.parametrize("P,rank", [
    (C(-5, 1), 1),
    (C(7, 0, 1, field=Q7), 1),
    (C(5, -2, 1, field=Qi), 2),
    (C(5, -2, 1), 2),          # ordinary, split over Q(i)
    (C(7, 0, 1), 1),           # supersingular
    (C(-1, 1), 0),
    (C(1, 0, 1), 0),
    (C(4, -4, 1), 1),          # repeated root collapses
])
def test_examples(P, rank):
    res = torus_rank(P)
    assert res.rank_estimate == rank
    assert res.rank_certified_upper == rank
    assert res.certified
    assert res.precision_bits_used == 512


def test_relation_for_sqrt_minus_7():
    res = torus_rank(C(7, 0, 1, field=Q7))
    assert res.relations.basis == ((1, -1),)
    assert res.relations.verified == (True,)
    assert res.multiplicities == (1, 1)


def test_multiplicities_recorded():
    res = torus_rank(from_roots([2, 2, 2, 3]))
    assert sorted(res.multiplicities) == [1, 3] and res.rank_estimate == 2


def test_heuristic_mode_never_certifies():
    res = torus_rank(C(5, -2, 1), mode=HEURISTIC)
    assert res.rank_estimate == 2 and not res.certified
    assert res.rank_certified_upper == res.relations.dimension


def test_not_split():
    with pytest.raises(NotSplitError):
        torus_rank(C(-2, 0, 0, 1))          # t^3 - 2 has a cubic factor
    with pytest.raises(NotSplitError):
        # sqrt(-2) and sqrt(-3) need different quadratic extensions
        torus_rank(CharPoly(Polynomial([2, 0, 1], QQ) * Polynomial([3, 0, 1], QQ)))
    with pytest.raises(NotSplitError):
        torus_rank(CharPoly(Polynomial([-(1 + 2 * i), 1], Qi) * Polynomial([-1, -1, 0, 1], Qi)))


def test_quadratic_factors_sharing_an_extension():
    # roots +-sqrt(-2), +-2 sqrt(-2): one generator up to torsion
    res = torus_rank(CharPoly(Polynomial([2, 0, 1], Qi) * Polynomial([8, 0, 1], Qi)))
    assert res.rank_estimate == 1 and res.certified
    # 1+-2i, -1+-2i, 2+-3i over Q: two torsion relations among six roots
    P = CharPoly(Polynomial([5, -2, 1]) * Polynomial([5, 2, 1]) * Polynomial([13, -4, 1]))
    res = torus_rank(P)
    assert res.rank_estimate == 4 and res.certified and len(res.relations.basis) == 2


def test_mixed_linear_and_quadratic():
    P = CharPoly(Polynomial([-2, 1]) * Polynomial([-3, 1]) * Polynomial([-6, 1])
                 * Polynomial([5, 0, 1]))
    assert torus_rank(P).rank_estimate == 3


def test_huge_rational_root_is_exact():
    res = torus_rank(C(-10**30, 1), precision_bits=64)
    assert res.rank_estimate == 1 and res.certified


def test_bad_mode():
    with pytest.raises(ValueError):
        torus_rank(C(-2, 1), mode="fast")


def test_products_of_primes_full_rank():
    rng = random.Random(7)
    primes = primes_below(60)
    for _ in range(10):
        k = rng.randint(1, 5)
        ps = rng.sample(primes, k)
        res = torus_rank(from_roots(ps))
        assert res.rank_estimate == k and res.certified


def test_power_invariance():
    for P in (C(5, -2, 1), C(7, 0, 1), C(13, 6, 1), from_roots([2, -2, 3])):
        r = torus_rank(P).rank_estimate
        for n in range(1, 7):
            res = torus_rank(power_charpoly(P, n))
            assert res.rank_estimate == r and res.certified


def test_tensor_square_does_not_raise_rank():
    for P in (C(5, -2, 1), C(7, 0, 1), from_roots([2, 3]), C(-(1 + 2 * i), 1, field=Qi)):
        assert torus_rank(tensor_charpoly(P, P)).rank_estimate <= torus_rank(P).rank_estimate


def test_scaling_by_q_changes_rank_by_at_most_one():
    for P, q in ((C(5, -2, 1), 5), (C(7, 0, 1), 7), (from_roots([2, 3]), 5)):
        scaled = tensor_charpoly(P, C(-q, 1))
        assert abs(torus_rank(scaled).rank_estimate - torus_rank(P).rank_estimate) <= 1


def test_thread_count_does_not_change_result(monkeypatch):
    P = from_roots([2, 4, 8, -2, 3])
    monkeypatch.setenv("FROBSYS_THREADS", "1")
    a = torus_rank(P)
    monkeypatch.setenv("FROBSYS_THREADS", "4")
    b = torus_rank(P)
    assert a == b


def test_candidates_are_primitive():
    with mpmath.workprec(200):
        zs = [mpmath.mpf(4), mpmath.mpf(8), mpmath.mpf(3)]
    for v in _candidate_relations(zs, 200, 32):
        assert gcd(*v) == 1


def _brute_force_rank(P, bound=4):
    K, roots = _split_exact(P.poly, 128)
    alphas = [r for r, _ in roots]
    one = K.one if K is not QQ else 1
    relations = []
    for v in itertools.product(range(-bound, bound + 1), repeat=len(alphas)):
        if not any(v):
            continue
        beta = one
        for a, e in zip(alphas, v):
            beta = beta * a ** e
        if _is_torsion(beta, K) is not None:
            relations.append(v)
    return len(alphas) - (_rank(relations) if relations else 0)


@pytest.mark.parametrize("P", [
    C(7, 0, 1, field=Q7), C(5, -2, 1, field=Qi), C(5, -2, 1), C(7, 0, 1), C(1, 0, 1),
    from_roots([2, 4, 3]), from_roots([2, -2]), C(-(1 + 2 * i), 1, field=Qi),
])
def test_brute_force_relation_oracle(P):
    assert torus_rank(P).rank_estimate == _brute_force_rank(P)


def test_rank_compare_examples():
    pl = Place("5", 5)
    same = [("a", FrobSample(pl, 1, C(5, -2, 1))), ("b", FrobSample(pl, 1, C(5, -2, 1)))]
    rep = rank_compare(same)
    assert rep.ranks_agree and rep.all_certified
    cm = [("a", FrobSample(pl, 1, C(-(1 + 2 * i), 1, field=Qi))),
          ("b", FrobSample(pl, 1, C(-(1 - 2 * i), 1, field=Qi)))]
    rep = rank_compare(cm)
    assert [r.rank_estimate for _, _, r in rep.rows] == [1, 1]
    mixed = [("q", FrobSample(pl, 1, C(5, -2, 1))),
             ("a", FrobSample(pl, 1, C(-(1 + 2 * i), 1, field=Qi)))]
    rep = rank_compare(mixed)
    assert [r.rank_estimate for _, _, r in rep.rows] == [2, 1]
    assert not rep.ranks_agree and not rep.equal_degrees


def test_rank_compare_common_level():
    pl = Place("5", 5)
    rep = rank_compare([("a", FrobSample(pl, 1, C(5, -2, 1))),
                        ("b", FrobSample(pl, 2, C(25, 6, 1)))])
    assert rep.level == 2 and rep.ranks_agree


def test_rank_compare_mixed_places():
    with pytest.raises(ValueError):
        rank_compare([("a", FrobSample(Place("5", 5), 1, C(-5, 1))),
                      ("b", FrobSample(Place("7", 7), 1, C(-7, 1)))])


def test_spurious_candidates_trigger_escalation():
    # at 32 bits LLL proposes relations among eight Gaussian primes; none survive
    P = CharPoly(Polynomial([5, -2, 1]) * Polynomial([13, -4, 1]) * Polynomial([17, 2, 1])
                 * Polynomial([29, -4, 1]))
    res = torus_rank(P, precision_bits=32)
    assert res.rank_estimate == res.rank_certified_upper == 8
    assert res.certified and res.precision_bits_used > 64
