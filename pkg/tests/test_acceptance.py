"""Acceptance criteria AC1-AC9, each with its exactness requirement and time limit."""

import random
import time
from contextlib import contextmanager

from frobsys.arith import primes_below
from frobsys.cli import main
from frobsys.cmhodge import CMField, EHodgeType, half_twist, half_twist_ladder, level
from frobsys.dataset import dumps_dataset
from frobsys.frobpoly import CharPoly, dual_charpoly, power_charpoly, sum_charpoly, tensor_charpoly
from frobsys.frobtorus import DEFAULT_PRECISION_BITS, torus_rank
from frobsys.ingest import (EllipticCurve, build_cm_system, build_curve_sheet, cm_split,
                            count_points, count_points_over_extension, frobenius_poly,
                            gaussian_field)
from frobsys.numfield import QQ, Embedding, NumberField, Polynomial, norm_poly
from frobsys.systems import (FrobSample, Place, System, VerdictKind, base_change_sample,
                             check_system, extend_system, restrict_system)
from oracles import (block_diag, faddeev_leverrier, inverse, kron, matpow, random_invertible,
                     random_monic, tensor_by_power_sums)

Qi = gaussian_field()


@contextmanager
def criterion(log, name, limit):
    """Time the body; record one PASS/FAIL line; fail on errors or overrun."""
    state = {"ok": False}
    start = time.perf_counter()
    try:
        yield state
        state["ok"] = True
    finally:
        elapsed = time.perf_counter() - start
        ok = state["ok"] and elapsed < limit
        line = f"{name}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s, limit {limit} s)"
        log.append(line)
        print(line)
    assert elapsed < limit, line


def test_ac1_combinators_match_matrix_oracles(acceptance_log):
    rng = random.Random(101)
    with criterion(acceptance_log, "AC1 combinators vs matrices", 60):
        for _ in range(200):
            A = random_invertible(rng, rng.randint(1, 5), bound=3)
            B = random_invertible(rng, rng.randint(1, 3), bound=3)
            PA, PB = CharPoly(faddeev_leverrier(A)), CharPoly(faddeev_leverrier(B))
            n = rng.randint(1, 6)
            assert power_charpoly(PA, n) == faddeev_leverrier(matpow(A, n))
            assert dual_charpoly(PA) == faddeev_leverrier(inverse(A))
            assert sum_charpoly(PA, PB) == faddeev_leverrier(block_diag(A, B))
            assert tensor_charpoly(PA, PB) == faddeev_leverrier(kron(A, B))


def test_ac2_tensor_resultant_vs_eigenvalue_oracle(acceptance_log):
    rng = random.Random(202)
    with criterion(acceptance_log, "AC2 tensor resultant formula", 30):
        for ring in (QQ, Qi):
            for _ in range(100):
                f = random_monic(rng, ring, rng.randint(1, 4))
                g = random_monic(rng, ring, rng.randint(1, 4))
                assert tensor_charpoly(CharPoly(f), CharPoly(g)).poly == tensor_by_power_sums(f, g)


def test_ac3_cm_curve_strongly_compatible(acceptance_log):
    with criterion(acceptance_log, "AC3 y^2=x^3+x over Q(i), p<500", 60):
        split = 0
        for p in primes_below(500):
            if p % 4 != 1:
                continue
            P = frobenius_poly(EllipticCurve(1, 0, p)).P
            pi, _ = cm_split(P, Qi)
            assert norm_poly(Polynomial([-pi, 1], Qi)) == P.poly
            split += 1
        system = build_cm_system(1, 0, Qi, 500, (("lambda3", 3), ("lambda7", 7)))
        report = check_system(system)
        assert report.strong_quasi_compatible
        compatible = [v for v in report.cells.values() if not v.excluded]
        assert all(v.kind is VerdictKind.COMPATIBLE and v.level == 1 for v in compatible)
        assert len(compatible) == split == 44


def test_ac4_twist_needs_level_two(acceptance_log):
    with criterion(acceptance_log, "AC4 curve vs quadratic twist, p<200", 60):
        curve = build_curve_sheet(1, 0, 200, label="curve")
        twist = build_curve_sheet(1, 0, 200, label="twist", twist=True)
        report = check_system(System(QQ, (curve, twist)))
        nonzero = 0
        for (_, _, pl), v in report.cells.items():
            P1 = curve.entries[pl].sample.P
            P2 = twist.entries[pl].sample.P
            if P1.coeffs[1]:
                assert P1 != P2 and str(v) == "CompatibleAt(2)"
                nonzero += 1
            else:
                assert str(v) == "CompatibleAt(1)"
        assert nonzero > 0 and report.strong_quasi_compatible


def test_ac5_base_change_vs_point_counts(acceptance_log):
    with criterion(acceptance_log, "AC5 base change vs F_{p^k} counts", 120):
        for a, b in ((1, 0), (2, 3)):
            for p in (5, 7, 11, 13):
                if (4 * a**3 + 27 * b**2) % p == 0:
                    continue
                s = FrobSample(Place(str(p), p, 1), 1,
                               CharPoly.from_coeffs((p, -count_points(EllipticCurve(a, b, p)), 1), QQ))
                for k in (1, 2, 3):
                    q = p**k
                    ak = q + 1 - count_points_over_extension(a, b, p, k)
                    bc = base_change_sample(s, k)
                    assert bc.place.f == k
                    assert bc.P == CharPoly.from_coeffs((q, -ak, 1), QQ)


def test_ac6_torus_ranks(acceptance_log):
    bits = DEFAULT_PRECISION_BITS
    cases = [
        (CharPoly.from_coeffs((5, -2, 1), QQ), 2),             # ordinary
        (CharPoly.from_coeffs((13, -6, 1), QQ), 2),
        (CharPoly.from_coeffs((7, 0, 1), QQ), 1),              # supersingular
        (CharPoly.from_coeffs((11, 0, 1), QQ), 1),
        (CharPoly.from_coeffs((-(1 + 2 * Qi.gen), 1), Qi), 1),  # split CM factor
        (CharPoly.from_coeffs((-(3 + 2 * Qi.gen), 1), Qi), 1),
    ]
    with criterion(acceptance_log, f"AC6 torus ranks at {bits} bits", 120):
        for P, rank in cases:
            for n in range(1, 7):
                res = torus_rank(power_charpoly(P, n), precision_bits=bits)
                assert res.rank_estimate == res.rank_certified_upper == rank
                assert res.certified


def _random_rank_one(rng):
    g = rng.randint(1, 5)
    idx = list(range(2 * g))
    rng.shuffle(idx)
    perm = [0] * (2 * g)
    for a, b in zip(idx[::2], idx[1::2]):
        perm[a], perm[b] = b, a
    F = CMField(2 * g, tuple(perm))
    w = rng.randint(0, 8)
    slots = {}
    for a, b in F.pairs():
        p = rng.randint(0, w)
        slots[a], slots[b] = (p, w - p), (w - p, p)
    return EHodgeType(F, w, slots)


def test_ac7_half_twist_law(acceptance_log):
    rng = random.Random(707)
    with criterion(acceptance_log, "AC7 half-twist law, 500 inputs", 10):
        done = 0
        while done < 500:
            V = _random_rank_one(rng)
            m = level(V)
            if m < 1:
                continue
            steps = half_twist_ladder(V)
            assert len(steps) == m
            cur = V
            for st in steps:
                W = half_twist(cur, st.phi, strict=st.strict)
                assert W == st.result
                assert W.weight == cur.weight + 1 and level(W) == level(cur) - 1
                cur = W
            assert level(cur) == 0
            done += 1


def test_ac8_norm_extension_coherence(acceptance_log):
    rng = random.Random(808)
    E1 = NumberField([-3, 1], name="E1", gen_name="c")
    K = NumberField(Polynomial([-Qi.gen, 0, 1], Qi), Qi, name="K", gen_name="s")
    K_abs = NumberField([1, 0, 0, 0, 1], name="Kabs", gen_name="th")

    def flatten(x):
        (a0, a1), (b0, b1) = (c.coeffs for c in x.coeffs)
        return K_abs([a0, b0, a1, b1])

    with criterion(acceptance_log, "AC8 norm/extension coherence", 30):
        for system in (System(QQ, (build_curve_sheet(1, 0, 200, label="rho"),
                                   build_curve_sheet(2, 3, 200, label="rho3", ell=3))),
                       restrict_system(build_cm_system(1, 0, Qi, 200))):
            back = restrict_system(extend_system(system, Embedding.inclusion(QQ, E1)))
            assert dumps_dataset(back) == dumps_dataset(system)
        for _ in range(100):
            f = random_monic(rng, Qi, rng.randint(1, 3))
            g = random_monic(rng, Qi, rng.randint(1, 3))
            assert norm_poly(f * g) == norm_poly(f) * norm_poly(g)
        for _ in range(100):
            f = random_monic(rng, K, rng.randint(1, 2), bound=2)
            assert norm_poly(norm_poly(f)) == norm_poly(f.map_coeffs(flatten, K_abs))


def test_ac9_negative_control(acceptance_log, tmp_path, capsys):
    path = tmp_path / "conj.jsonl"
    with criterion(acceptance_log, "AC9 conjugate fixture rejected", 30):
        assert main(["cm-fixture", "--p-max", "200", "--conjugate", "--out", str(path)]) == 0
        capsys.readouterr()
        code = main(["check", str(path), "--n-max", "120"])
        out = capsys.readouterr().out
        assert code == 1
        assert "INCOMPATIBLE: first failing place 5 " in out
