"""Characteristic polynomials of Frobenius and their combinators.

All combinators act on eigenvalue multisets only.  Powers and tensor products
are bivariate resultants, so the output coefficients are integral polynomial
expressions in the input coefficients and stay in the input field.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numfield import QQ, PolyRing, Polynomial, resultant


class CharPolyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CharPoly:
    """Monic polynomial with nonzero constant term over a field."""

    poly: Polynomial

    def __post_init__(self):
        p = self.poly
        if p.degree < 1:
            raise CharPolyError("a characteristic polynomial has positive degree")
        if not p.is_monic():
            raise CharPolyError(f"not monic: {p!r}")
        if not p.coeffs[0]:
            raise CharPolyError(f"zero eigenvalue (constant term 0): {p!r}")

    @classmethod
    def from_coeffs(cls, coeffs, field=QQ) -> "CharPoly":
        return cls(Polynomial(coeffs, field))

    @property
    def field(self):
        return self.poly.ring

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def coeffs(self) -> tuple:
        return self.poly.coeffs

    def __eq__(self, other):
        if isinstance(other, CharPoly):
            return self.poly == other.poly
        if isinstance(other, Polynomial):
            return self.poly == other
        return NotImplemented

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"CharPoly({self.poly!r})"


def _check_same_field(P: CharPoly, Q: CharPoly):
    if P.field != Q.field:
        raise CharPolyError(f"field mismatch: {P.field.name} vs {Q.field.name}")


def power_charpoly(P: CharPoly, n: int) -> CharPoly:
    """Charpoly of F^n from that of F: ``Res_y(P(y), t - y^n)``."""
    if n < 1:
        raise CharPolyError("exponent must be >= 1")
    if n == 1:
        return P
    E = P.field
    # P is monic, so only y^n mod P matters; square-and-multiply keeps degrees below deg P
    r = Polynomial([E.one], E)
    base = Polynomial([E.zero, E.one], E) % P.poly
    k = n
    while k:
        if k & 1:
            r = (r * base) % P.poly
        base = (base * base) % P.poly
        k >>= 1
    R = PolyRing(E)
    f = Polynomial._make(R, [R(c) for c in P.coeffs])
    rc = list(r.coeffs) or [E.zero]
    g = Polynomial._make(R, [R.gen() - R(rc[0])] + [R(-c) for c in rc[1:]])
    return CharPoly(resultant(f, g, P.degree, g.degree))


def dual_charpoly(P: CharPoly) -> CharPoly:
    """Eigenvalues inverted: reversed coefficients, made monic."""
    return CharPoly(P.poly.reversed().monic())


def sum_charpoly(P: CharPoly, Q: CharPoly) -> CharPoly:
    _check_same_field(P, Q)
    return CharPoly(P.poly * Q.poly)


def tensor_charpoly(P: CharPoly, Q: CharPoly) -> CharPoly:
    """Eigenvalues multiplied pairwise.

    ``Res_y(P(y), y^m Q(t/y))`` with ``m = deg Q``; the kernel
    ``y^m Q(t/y) = sum_k q_k t^k y^(m-k)`` is written down by reversing the
    coefficients of Q, so no division occurs.
    """
    _check_same_field(P, Q)
    E = P.field
    R = PolyRing(E)
    m = Q.degree
    f = Polynomial._make(R, [R(c) for c in P.coeffs])
    kernel = [R.zero] * (m + 1)
    for k, qk in enumerate(Q.coeffs):
        kernel[m - k] = Polynomial.monomial(E, k, qk)
    g = Polynomial._make(R, kernel)
    return CharPoly(resultant(f, g, P.degree, m))


def hom_charpoly(P: CharPoly, Q: CharPoly) -> CharPoly:
    """Internal Hom: eigenvalues ``beta_j / alpha_i``."""
    _check_same_field(P, Q)
    return tensor_charpoly(dual_charpoly(P), Q)
