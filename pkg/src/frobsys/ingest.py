"""Frobenius data from elliptic curves over prime fields.

Curves are short Weierstrass ``y^2 = x^3 + a x + b`` over F_p with p >= 5.
Point counts come from the quadratic-character sum; extension traces from
the recurrence ``t_k = a_p t_{k-1} - p t_{k-2}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .arith import is_prime, primes_below
from .frobpoly import CharPoly
from .numfield import QQ, NFElement, NumberField, Polynomial, norm_poly
from .systems import (UNKNOWN, DataError, Entry, FrobSample, Place, RepSheet, System,
                      worker_count)

MAX_COUNT_PRIME = 10**6


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class EllipticCurve:
    a: int
    b: int
    p: int

    def __post_init__(self):
        if self.p in (2, 3):
            raise CurveError("p = 2, 3 are not supported (short Weierstrass form)")
        if not is_prime(self.p):
            raise CurveError(f"{self.p} is not prime")
        if self.discriminant_check % self.p == 0:
            raise CurveError(f"y^2 = x^3 + {self.a}x + {self.b} is singular mod {self.p}")

    @property
    def discriminant_check(self) -> int:
        return (4 * self.a**3 + 27 * self.b**2) % self.p


def _legendre_table(p: int) -> np.ndarray:
    chi = np.full(p, -1, dtype=np.int64)
    xs = np.arange(p, dtype=np.int64)
    chi[(xs * xs) % p] = 1
    chi[0] = 0
    return chi


def count_points(curve: EllipticCurve) -> int:
    """Return ``a_p = p + 1 - #E(F_p)``."""
    p = curve.p
    if p > MAX_COUNT_PRIME:
        raise CurveError(f"p = {p} exceeds the naive counting guard {MAX_COUNT_PRIME}")
    chi = _legendre_table(p)
    a, b = curve.a % p, curve.b % p
    chunks = np.array_split(np.arange(p, dtype=np.int64), max(1, min(worker_count(), p)))
    total = 0
    for xs in chunks:
        rhs = (((xs * xs) % p) * xs + a * xs + b) % p
        total += int(chi[rhs].sum())
    # #E = 1 + sum_x (1 + chi(rhs)) so a_p = -sum_x chi(rhs)
    ap = -total
    if ap * ap > 4 * p:
        raise AssertionError(f"Weil bound violated: a_p={ap}, p={p}")
    return ap


def frobenius_poly(curve: EllipticCurve) -> FrobSample:
    ap = count_points(curve)
    P = CharPoly(Polynomial([curve.p, -ap, 1], QQ))
    return FrobSample(Place(str(curve.p), curve.p, 1), 1, P)


def extension_trace(ap: int, p: int, k: int) -> int:
    """Trace of F^k from the trace of F: ``a_{p^k}``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    t0, t1 = 2, ap
    for _ in range(k - 1):
        t0, t1 = t1, ap * t1 - p * t0
    return t1


def least_nonresidue(p: int) -> int:
    for d in range(2, p):
        if pow(d, (p - 1) // 2, p) == p - 1:
            return d
    raise ValueError(f"no quadratic non-residue mod {p}")


def quadratic_twist(curve: EllipticCurve, d: int | None = None) -> EllipticCurve:
    """Twist by ``d`` (default: the least non-residue mod p)."""
    d = least_nonresidue(curve.p) if d is None else d
    p = curve.p
    return EllipticCurve(curve.a * d * d % p, curve.b * d**3 % p, p)


# ---------------------------------------------------------------------------
# brute-force counting over F_{p^k}


def _irreducible_over_fp(p: int, k: int) -> tuple[int, ...]:
    from .numfield import irreducible_mod_p
    for tail in product(range(p), repeat=k):
        coeffs = list(tail) + [1]
        if coeffs[0] and irreducible_mod_p(coeffs, p):
            return tuple(coeffs)
    raise ValueError(f"no irreducible polynomial of degree {k} over F_{p}")


def count_points_over_extension(a: int, b: int, p: int, k: int) -> int:
    """``#E(F_{p^k})`` by enumerating all x in an explicit model of F_{p^k}."""
    mod = (0,) if k == 1 else _irreducible_over_fp(p, k)

    def mul(u, v):
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for m in range(2 * k - 2, k - 1, -1):
            c = prod[m]
            if c:
                for j in range(k):
                    prod[m - k + j] = (prod[m - k + j] - c * mod[j]) % p
        return tuple(prod[:k])

    elems = list(product(range(p), repeat=k))
    squares = {mul(z, z) for z in elems}
    zero = (0,) * k
    A = ((a % p),) + (0,) * (k - 1)
    B = ((b % p),) + (0,) * (k - 1)
    count = 1
    for x in elems:
        x2 = mul(x, x)
        rhs = tuple((u + v + w) % p for u, v, w in zip(mul(x2, x), mul(A, x), B))
        if rhs == zero:
            count += 1
        elif rhs in squares:
            count += 2
    return count


# ---------------------------------------------------------------------------
# CM splitting


def _imaginary_quadratic_d(E: NumberField) -> int:
    f = E.min_poly
    if E.base is not QQ or f.degree != 2 or f[1] != 0 or f[0] <= 0 or f[0].denominator != 1:
        raise ValueError(f"{E.name} is not presented as Q[u]/(u^2 + d) with d > 0")
    return int(f[0])


def cm_split(P: CharPoly, E: NumberField):
    """Split ``t^2 - a t + p`` over ``E = Q(sqrt(-d))``.

    Returns ``(pi, pi_bar)`` with ``pi = (a + c sqrt(-d))/2``, ``c > 0``, or
    None when a = 0 (supersingular) or ``4p - a^2`` is not ``d`` times a square.
    """
    d = _imaginary_quadratic_d(E)
    if P.field is not QQ or P.degree != 2:
        raise ValueError("cm_split expects a quadratic charpoly over Q")
    p, minus_a, _ = P.coeffs
    a = -minus_a
    if a.denominator != 1 or p.denominator != 1:
        raise ValueError("cm_split expects integer coefficients")
    a, p = int(a), int(p)
    if a == 0:
        return None
    disc = 4 * p - a * a
    if disc <= 0 or disc % d:
        return None
    c = math.isqrt(disc // d)
    if c * c * d != disc:
        return None
    pi = E([Fraction(a, 2), Fraction(c, 2)])
    pi_bar = E([Fraction(a, 2), Fraction(-c, 2)])
    check = norm_poly(Polynomial([-pi, 1], E))
    if check != P.poly:
        raise AssertionError(f"norm of t - pi is {check!r}, expected {P.poly!r}")
    return pi, pi_bar


def gaussian_field() -> NumberField:
    return NumberField([1, 0, 1], name="Qi", gen_name="i")


def build_cm_system(a: int, b: int, E: NumberField, p_max: int,
                    lambdas: tuple[tuple[str, int], ...] = (("lambda3", 3), ("lambda7", 7)),
                    conjugate: bool = False) -> System:
    """Two (or more) lambda-sheets over E from a CM curve.

    At split ordinary places every sheet gets ``(n=1, t - pi)``; with
    ``conjugate=True`` the second and later sheets get ``t - pi_bar`` instead,
    which is a deliberately incompatible fixture.  Other good places are
    Unknown, with the Q-level charpoly kept as a note.
    """
    ells = [ell for _, ell in lambdas]
    if len(set(ells)) != len(ells):
        raise ValueError("residue characteristics of the lambdas must differ")
    entries: list[dict] = [dict() for _ in lambdas]
    notes: dict = {}
    for p in primes_below(p_max):
        if p < 5 or (4 * a**3 + 27 * b**2) % p == 0:
            continue
        sample = frobenius_poly(EllipticCurve(a, b, p))
        place = sample.place
        split = cm_split(sample.P, E)
        if split is None:
            for ent in entries:
                ent[place.label] = Entry(place, UNKNOWN)
            notes[place.label] = sample.P
            continue
        pi, pi_bar = split
        for i, ent in enumerate(entries):
            root = pi_bar if (conjugate and i > 0) else pi
            ent[place.label] = Entry.of(FrobSample(place, 1, CharPoly(Polynomial([-root, 1], E))))
    sheets = tuple(RepSheet(E, label, ell, ent, over=(f"l{ell}",), dim=1, notes=notes)
                   for (label, ell), ent in zip(lambdas, entries))
    return System(E, sheets)


def build_curve_sheet(a: int, b: int, p_max: int, label: str = "rho", ell: int = 2,
                      ext_degrees: tuple[int, ...] = (), twist: bool = False) -> RepSheet:
    """One Q-rational sheet of ``t^2 - a_p t + p`` for good p < p_max.

    ``twist`` replaces the curve at each p by its twist by the least
    quadratic non-residue mod p; ``ext_degrees`` adds samples at the residue
    extensions of degree k (via the trace recurrence).
    """
    entries = {}
    for p in primes_below(p_max):
        if p < 5 or (4 * a**3 + 27 * b**2) % p == 0:
            continue
        curve = EllipticCurve(a % p, b % p, p)
        if twist:
            curve = quadratic_twist(curve)
        ap = count_points(curve)
        base = Place(str(p), p, 1)
        entries[base.label] = Entry.of(FrobSample(base, 1, CharPoly(Polynomial([p, -ap, 1], QQ))))
        for k in ext_degrees:
            if k == 1:
                continue
            tk = extension_trace(ap, p, k)
            pl = Place(f"{p}^{k}", p, k)
            P = CharPoly(Polynomial([p**k, -tk, 1], QQ))
            entries[pl.label] = Entry.of(FrobSample(pl, 1, P))
    if not entries:
        raise DataError("no good primes in range")
    return RepSheet(QQ, label, ell, entries, dim=2)


__all__ = [
    "CurveError", "EllipticCurve", "build_cm_system", "build_curve_sheet", "cm_split",
    "count_points", "count_points_over_extension", "extension_trace", "frobenius_poly",
    "gaussian_field", "least_nonresidue", "quadratic_twist", "NFElement",
]
