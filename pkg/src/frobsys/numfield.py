"""Exact arithmetic over Q and over explicit number-field towers.

A number field is presented as ``base[y]/(f)`` with ``f`` monic over ``base``,
where ``base`` is either :data:`QQ` or another :class:`NumberField`.  Towers
are capped at depth two (Q in E in E~).  Elements are coefficient vectors over
the base field; polynomials are dense ascending coefficient tuples over a
coefficient ring, which may itself be a polynomial ring (this is how the
bivariate resultants of :mod:`frobsys.frobpoly` are expressed).
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import first_primes

log = logging.getLogger(__name__)

Rational = Fraction

MAX_TOWER_DEPTH = 2
CERTIFY_PRIMES = 50


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        num, sep, den = text.strip().partition("/")
        if sep:
            if int(den) <= 0:
                raise ValueError(f"denominator must be positive: {text!r}")
            return Fraction(int(num), int(den))
        return Fraction(int(num))
    raise TypeError(f"cannot read a rational from {text!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class RationalField:
    """The field Q; elements are :class:`fractions.Fraction`."""

    name = "Q"
    gen_name = None
    base = None
    min_poly = None
    depth = 0
    degree = 1
    absolute_degree = 1
    is_field = True
    certified = True
    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, x) -> Fraction:
        if isinstance(x, NFElement):
            raise TypeError(f"element of {x.field.name} is not rational")
        return parse_rational(x)

    def __repr__(self):
        return "QQ"

    def __reduce__(self):
        return "QQ"

    def div(self, a, b):
        return a / b

    def tower(self):
        return (self,)

    def to_absolute(self, x):
        return [Fraction(x)]

    def from_absolute(self, vec):
        (x,) = vec
        return Fraction(x)

    def element_from_python(self, obj):
        return self(obj)


QQ = RationalField()


class NumberField:
    """``base[y]/(min_poly)`` for a monic ``min_poly`` over ``base``.

    Irreducibility is certified by finding a prime modulo which the (absolute)
    defining polynomial is irreducible; failing that the field is accepted but
    ``certified`` is False and a warning is recorded in ``warnings``.
    """

    is_field = True

    def __init__(self, min_poly, base=QQ, name: str = "E", gen_name: str = "a",
                 certify: bool = True):
        if base.depth >= MAX_TOWER_DEPTH:
            raise ValueError(f"tower depth is capped at {MAX_TOWER_DEPTH}")
        if not isinstance(min_poly, Polynomial):
            min_poly = Polynomial(min_poly, base)
        elif min_poly.ring != base:
            raise ValueError("min_poly must have coefficients in the base field")
        if min_poly.degree < 1:
            raise ValueError("min_poly must have degree >= 1")
        if min_poly.lc != base.one:
            raise ValueError("min_poly must be monic")
        self.base = base
        self.name = name
        self.gen_name = gen_name
        self.min_poly = min_poly
        self.degree = min_poly.degree
        self.depth = base.depth + 1
        self.absolute_degree = self.degree * base.absolute_degree
        self._f = min_poly.coeffs
        self._f_support = [(j, c) for j, c in enumerate(self._f[:-1]) if c]
        z = base.zero
        self.zero = NFElement(self, (z,) * self.degree)
        self.one = NFElement(self, (base.one,) + (z,) * (self.degree - 1))
        if self.degree == 1:
            self.gen = NFElement(self, (-self._f[0],))
        else:
            self.gen = NFElement(self, (z, base.one) + (z,) * (self.degree - 2))
        self.warnings: list[str] = []
        self.certified = False
        if certify:
            self.certified = certify_irreducible(self)
            if not self.certified:
                msg = (f"field {name}: no irreducibility certificate among the first "
                       f"{CERTIFY_PRIMES} primes; accepted as trusted")
                self.warnings.append(msg)
                log.warning(msg)

    # structural identity, so independently loaded copies interoperate
    def _key(self):
        return (self.name, self.base, self._f)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NumberField):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash((self.name, self.degree, self.depth))

    def __repr__(self):
        return f"NumberField({self.name}: {self.min_poly!r} over {self.base.name})"

    def tower(self):
        return self.base.tower() + (self,)

    def contains_field(self, other) -> bool:
        return any(other == k for k in self.tower())

    def div(self, a, b):
        return a / b

    def __call__(self, x) -> "NFElement":
        if isinstance(x, NFElement):
            if x.field is self or x.field == self:
                return x
            if self.base is not QQ and self.base.contains_field(x.field):
                x = self.base(x)
                return NFElement(self, (x,) + (self.base.zero,) * (self.degree - 1))
            if self.base == x.field:
                return NFElement(self, (x,) + (self.base.zero,) * (self.degree - 1))
            raise TypeError(f"cannot coerce element of {x.field.name} into {self.name}")
        if isinstance(x, (list, tuple)):
            if len(x) != self.degree:
                raise ValueError(f"{self.name} elements have {self.degree} coefficients, "
                                 f"got {len(x)}")
            return NFElement(self, tuple(self.base(c) for c in x))
        c = self.base(x)
        return NFElement(self, (c,) + (self.base.zero,) * (self.degree - 1))

    def _reduce(self, coeffs: list) -> tuple:
        d = self.degree
        for k in range(len(coeffs) - 1, d - 1, -1):
            c = coeffs[k]
            if c:
                off = k - d
                for j, fj in self._f_support:
                    coeffs[off + j] = coeffs[off + j] - c * fj
        return tuple(coeffs[:d])

    def to_absolute(self, x: "NFElement") -> list:
        out: list = []
        for c in x.coeffs:
            out.extend(self.base.to_absolute(c))
        return out

    def from_absolute(self, vec: Sequence) -> "NFElement":
        m = self.base.absolute_degree
        if len(vec) != self.absolute_degree:
            raise ValueError("absolute vector has the wrong length")
        return NFElement(self, tuple(self.base.from_absolute(vec[j * m:(j + 1) * m])
                                     for j in range(self.degree)))


def _conv(a: Sequence, b: Sequence, zero) -> list:
    if not a or not b:
        return []
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return out


def _conv_q(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    """Convolution over Q done on cleared-denominator integers."""
    if not a or not b:
        return []
    da = math.lcm(*(x.denominator for x in a))
    db = math.lcm(*(x.denominator for x in b))
    ia = [x.numerator * (da // x.denominator) for x in a]
    ib = [x.numerator * (db // x.denominator) for x in b]
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(ia):
        if x:
            for j, y in enumerate(ib):
                out[i + j] += x * y
    den = da * db
    return [Fraction(c, den) for c in out]


class NFElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def _lift(self, other):
        if isinstance(other, NFElement) and (other.field is self.field):
            return other
        try:
            return self.field(other)
        except (TypeError, ValueError):
            return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return NFElement(self.field, tuple(x + y for x, y in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return NFElement(self.field, tuple(x - y for x, y in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return NFElement(self.field, tuple(-x for x in self.coeffs))

    def __mul__(self, other):
        F = self.field
        if not isinstance(other, NFElement) or other.field is not F:
            if isinstance(other, (int, Fraction)):
                c = Fraction(other)
                return NFElement(F, tuple(x * c for x in self.coeffs))
            o = self._lift(other)
            if o is None:
                return NotImplemented
            if o.field is not F:
                o = NFElement(F, o.coeffs)
            other = o
        if F.base is QQ:
            prod = _conv_q(self.coeffs, other.coeffs)
        else:
            prod = _conv(self.coeffs, other.coeffs, F.base.zero)
        return NFElement(F, F._reduce(prod))

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        if not self:
            raise ZeroDivisionError("inverse of zero in a number field")
        F = self.field
        a = Polynomial(self.coeffs, F.base)
        g, s, _ = poly_xgcd(a, F.min_poly)
        if g.degree != 0:
            raise ArithmeticError(f"{F.name}: min_poly is reducible (zero divisor found)")
        s = s * (F.base.one / g.coeffs[0])
        cs = list(s.coeffs) + [F.base.zero] * (F.degree - len(s.coeffs))
        return NFElement(F, tuple(cs[:F.degree]))

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, NFElement) and other.field is self.field:
            return self.coeffs == other.coeffs
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        if not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash(self.coeffs)

    def is_base(self) -> bool:
        """True when the element lies in the base field."""
        return not any(self.coeffs[1:])

    def to_absolute(self) -> list[Fraction]:
        return self.field.to_absolute(self)

    def __repr__(self):
        terms = []
        g = self.field.gen_name
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = _fmt_coeff(c)
            if j == 0:
                terms.append(cs)
            else:
                mono = g if j == 1 else f"{g}^{j}"
                terms.append(mono if cs == "1" else f"-{mono}" if cs == "-1" else f"{cs}*{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def _fmt_coeff(c) -> str:
    if isinstance(c, Fraction):
        return format_rational(c)
    s = repr(c)
    return s if (" " not in s) else f"({s})"


class Polynomial:
    """Dense polynomial with ascending coefficients over ``ring``.

    The zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("ring", "coeffs")

    def __init__(self, coeffs: Iterable = (), ring=QQ):
        cs = [ring(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.ring = ring
        self.coeffs = tuple(cs)

    @classmethod
    def _make(cls, ring, cs: list) -> "Polynomial":
        while cs and not cs[-1]:
            cs.pop()
        p = cls.__new__(cls)
        p.ring = ring
        p.coeffs = tuple(cs)
        return p

    @classmethod
    def monomial(cls, ring, k: int, c=None) -> "Polynomial":
        c = ring.one if c is None else ring(c)
        return cls._make(ring, [ring.zero] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else self.ring.zero

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ring.zero

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def _lift(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            if other.ring is self.ring or other.ring == self.ring:
                return other
            if isinstance(self.ring, PolyRing):
                return Polynomial._make(self.ring, [self.ring(other)])
            try:
                return Polynomial._make(self.ring, [self.ring(c) for c in other.coeffs])
            except (TypeError, ValueError):
                return None
        try:
            return Polynomial._make(self.ring, [self.ring(other)])
        except (TypeError, ValueError):
            return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, y in enumerate(b):
            cs[i] = cs[i] + y
        return Polynomial._make(self.ring, cs)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._make(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, Polynomial) and (other.ring is self.ring or other.ring == self.ring):
            o = other
        else:
            o = self._lift(other)
            if o is None:
                return NotImplemented
        if self.ring is QQ:
            cs = _conv_q(self.coeffs, o.coeffs)
        else:
            cs = _conv(self.coeffs, o.coeffs, self.ring.zero)
        return Polynomial._make(self.ring, cs)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial._make(self.ring, [self.ring.one])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _lc_inverse(self):
        lc = self.lc
        if self.ring.is_field:
            return self.ring.one / lc
        return self.ring.unit_inverse(lc)

    def __divmod__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("polynomial division by zero")
        inv = o._lc_inverse()
        r = list(self.coeffs)
        db = o.degree
        if len(r) - 1 < db:
            return Polynomial._make(self.ring, []), self
        q = [self.ring.zero] * (len(r) - db)
        bc = o.coeffs
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k]
            if not c:
                continue
            c = c * inv
            q[k - db] = c
            off = k - db
            for j in range(db + 1):
                if bc[j]:
                    r[off + j] = r[off + j] - c * bc[j]
        return Polynomial._make(self.ring, q), Polynomial._make(self.ring, r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Polynomial":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            if other.ring is not self.ring and other.ring != self.ring:
                return False
            return self.coeffs == other.coeffs
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        return self.ring.zero if acc is None else acc

    def monic(self) -> "Polynomial":
        if not self:
            raise ZeroDivisionError("zero polynomial has no monic associate")
        inv = self._lc_inverse()
        return Polynomial._make(self.ring, [c * inv for c in self.coeffs])

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.lc == self.ring.one

    def derivative(self) -> "Polynomial":
        return Polynomial._make(self.ring, [c * k for k, c in enumerate(self.coeffs) if k])

    def map_coeffs(self, fn, ring) -> "Polynomial":
        return Polynomial._make(ring, [fn(c) for c in self.coeffs])

    def reversed(self) -> "Polynomial":
        return Polynomial._make(self.ring, list(reversed(self.coeffs)))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            cs = _fmt_coeff(c)
            if k == 0:
                terms.append(cs)
                continue
            mono = "t" if k == 1 else f"t^{k}"
            if cs == "1":
                terms.append(mono)
            elif cs == "-1":
                terms.append(f"-{mono}")
            else:
                terms.append(f"{cs}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")


class PolyRing:
    """The ring ``base[t]`` used as a coefficient domain (not a field)."""

    is_field = False

    def __init__(self, base, var: str = "t"):
        self.base = base
        self.var = var
        self.zero = Polynomial._make(base, [])
        self.one = Polynomial._make(base, [base.one])
        self.name = f"{getattr(base, 'name', base)}[{var}]"

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.base == other.base and self.var == other.var

    def __hash__(self):
        return hash(("PolyRing", self.var))

    def __repr__(self):
        return f"PolyRing({self.name})"

    def __call__(self, x) -> Polynomial:
        if isinstance(x, Polynomial) and (x.ring is self.base or x.ring == self.base):
            return x
        return Polynomial._make(self.base, [self.base(x)])

    def gen(self) -> Polynomial:
        return Polynomial.monomial(self.base, 1)

    def unit_inverse(self, x: Polynomial) -> Polynomial:
        if x.degree != 0:
            raise ArithmeticError("not a unit in a polynomial ring")
        return Polynomial._make(self.base, [self.base.one / x.coeffs[0]])

    def div(self, a: Polynomial, b: Polynomial) -> Polynomial:
        return a.exact_div(b)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over a field (zero if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic() if a else a


def poly_xgcd(a: Polynomial, b: Polynomial):
    """Return ``(g, s, t)`` with ``s*a + t*b = g``; ``g`` is not normalised."""
    R = a.ring
    s0, s1 = Polynomial._make(R, [R.one]), Polynomial._make(R, [])
    t0, t1 = Polynomial._make(R, []), Polynomial._make(R, [R.one])
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def squarefree_part(P: Polynomial) -> Polynomial:
    """Monic product of the distinct irreducible factors (characteristic 0)."""
    g = poly_gcd(P, P.derivative())
    return (P.exact_div(g) if g.degree > 0 else P).monic()


# ---------------------------------------------------------------------------
# determinants and resultants


def bareiss_determinant(matrix: Sequence[Sequence], ring):
    """Fraction-free (Bareiss) determinant with row pivoting.

    Every division is exact in ``ring``; over a polynomial ring this keeps the
    intermediate entries as minors of the input rather than rational functions.
    """
    n = len(matrix)
    if n == 0:
        return ring.one
    M = [list(row) for row in matrix]
    sign = 1
    prev = ring.one
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return ring.zero
        pivot = M[k][k]
        rowk = M[k]
        for i in range(k + 1, n):
            rowi = M[i]
            mik = rowi[k]
            for j in range(k + 1, n):
                v = rowi[j] * pivot
                if mik and rowk[j]:
                    v = v - mik * rowk[j]
                rowi[j] = ring.div(v, prev) if (v and prev != ring.one) else v
        prev = pivot
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det


def sylvester_matrix(f: Polynomial, g: Polynomial, deg_f: int, deg_g: int) -> list[list]:
    R = f.ring
    size = deg_f + deg_g
    fc = [f[k] for k in range(deg_f, -1, -1)]
    gc = [g[k] for k in range(deg_g, -1, -1)]
    rows = []
    for i in range(deg_g):
        rows.append([R.zero] * i + fc + [R.zero] * (size - i - len(fc)))
    for i in range(deg_f):
        rows.append([R.zero] * i + gc + [R.zero] * (size - i - len(gc)))
    return rows


def resultant(f: Polynomial, g: Polynomial, deg_f: int | None = None,
              deg_g: int | None = None):
    """Resultant of ``f`` and ``g`` with respect to their variable.

    Computed as the determinant of the Sylvester matrix of size
    ``deg_f + deg_g`` by Bareiss elimination, with the convention
    ``Res(f, g) = lc(f)^deg(g) * prod g(alpha)`` over the roots of ``f``.
    When ``f`` is monic of its declared degree, ``g`` is first reduced modulo
    ``f``; this does not change the value and keeps the matrix small.
    """
    if f.ring != g.ring:
        raise ValueError("resultant of polynomials over different coefficient rings")
    deg_f = f.degree if deg_f is None else deg_f
    deg_g = g.degree if deg_g is None else deg_g
    if not f and not g:
        raise ValueError("resultant of two zero polynomials")
    if deg_f < f.degree or deg_g < g.degree:
        raise ValueError(f"declared degrees ({deg_f}, {deg_g}) below actual "
                         f"({f.degree}, {g.degree})")
    deg_f = max(deg_f, 0)
    deg_g = max(deg_g, 0)
    R = f.ring
    if deg_f >= 1 and f.degree == deg_f and f.lc == R.one and g.degree >= deg_f:
        g = g % f
        if not g:
            return R.zero
        deg_g = g.degree
    return bareiss_determinant(sylvester_matrix(f, g, deg_f, deg_g), R)


# ---------------------------------------------------------------------------
# norms, embeddings, minimal polynomials


def norm_poly(P: Polynomial, field: NumberField | None = None) -> Polynomial:
    """Norm of ``P`` from its coefficient field E down to ``E.base``.

    Computed as ``Res_y(g(y), P_y(t))`` where ``g`` is the relative minimal
    polynomial and ``P_y`` replaces the generator of E by ``y``.  The result
    has degree ``[E:E'] * deg P`` and is monic when ``P`` is.
    """
    E = P.ring if field is None else field
    if not isinstance(E, NumberField):
        raise ValueError("norm_poly needs a polynomial over a NumberField")
    if P.ring != E:
        raise ValueError(f"polynomial is over {getattr(P.ring, 'name', P.ring)}, "
                         f"not {E.name}")
    if not P:
        raise ValueError("norm of the zero polynomial")
    B = E.base
    R = PolyRing(B)
    cols = [Polynomial._make(B, [c.coeffs[j] for c in P.coeffs]) for j in range(E.degree)]
    H = Polynomial._make(R, cols)
    g = Polynomial._make(R, [R(c) for c in E.min_poly.coeffs])
    return resultant(g, H)


class Embedding:
    """Field homomorphism ``source -> target`` fixed on ``source.base``.

    ``generator_image`` is the image of the source generator; it must be a root
    of the source min_poly in the target (checked at construction).
    """

    def __init__(self, source, target, generator_image=None):
        self.source = source
        self.target = target
        if source is QQ:
            self.generator_image = None
            return
        if not target.contains_field(source.base) and source.base is not QQ:
            raise ValueError(f"{target.name} does not contain {source.base.name}")
        img = target(generator_image)
        check = source.min_poly.map_coeffs(target, target)(img)
        if check != target.zero:
            raise ValueError(f"{img!r} is not a root of {source.name}'s min_poly in "
                             f"{target.name}")
        self.generator_image = img

    @classmethod
    def identity(cls, field) -> "Embedding":
        return cls(field, field, None if field is QQ else field.gen)

    @classmethod
    def inclusion(cls, field, extension: NumberField) -> "Embedding":
        """The structural inclusion of a field into a field built on top of it."""
        if field is QQ:
            return cls(QQ, extension)
        if not extension.contains_field(field):
            raise ValueError(f"{field.name} is not in the tower of {extension.name}")
        return cls(field, extension, extension(field.gen))

    def __call__(self, x):
        x = self.source(x)
        if self.source is QQ:
            return self.target(x)
        acc = self.target.zero
        for c in reversed(x.coeffs):
            acc = acc * self.generator_image + self.target(c)
        return acc

    def __repr__(self):
        return (f"Embedding({self.source.name} -> {self.target.name}, "
                f"gen -> {self.generator_image!r})")


def embed_poly(P: Polynomial, phi: Embedding) -> Polynomial:
    if P.ring != phi.source:
        raise ValueError("polynomial field does not match the embedding source")
    return P.map_coeffs(phi, phi.target)


def _absolute(x) -> list[Fraction]:
    if isinstance(x, NFElement):
        return x.to_absolute()
    return [Fraction(x)]


def minimal_polynomial(theta) -> Polynomial:
    """Monic minimal polynomial over Q, from the first linear dependence
    among 1, theta, theta^2, ... (exact elimination)."""
    if not isinstance(theta, NFElement):
        return Polynomial([-Fraction(theta), 1], QQ)
    d = theta.field.absolute_degree
    # echelon rows: (vector, combination over the powers)
    pivots: list[tuple[int, list[Fraction], list[Fraction]]] = []
    power = theta.field.one
    for k in range(d + 1):
        vec = _absolute(power)
        comb = [Fraction(0)] * (d + 1)
        comb[k] = Fraction(1)
        for col, pv, pc in pivots:
            c = vec[col]
            if c:
                vec = [a - c * b for a, b in zip(vec, pv)]
                comb = [a - c * b for a, b in zip(comb, pc)]
        nz = next((i for i, v in enumerate(vec) if v), None)
        if nz is None:
            return Polynomial(comb[:k + 1], QQ).monic()
        inv = 1 / vec[nz]
        pivots.append((nz, [v * inv for v in vec], [c * inv for c in comb]))
        power = power * theta
    raise ArithmeticError("no linear dependence found; field degree is inconsistent")


# ---------------------------------------------------------------------------
# irreducibility certificates modulo primes


def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a: list[int], f: list[int], p: int) -> list[int]:
    a = list(a)
    df = len(f) - 1
    inv = pow(f[-1], -1, p)
    for k in range(len(a) - 1, df - 1, -1):
        c = a[k] * inv % p
        if c:
            off = k - df
            for j in range(df + 1):
                a[off + j] = (a[off + j] - c * f[j]) % p
    return _fp_trim(a[:df])


def _fp_mulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _fp_mod(out, f, p)


def _fp_powmod(a, e, f, p):
    result = [1]
    a = _fp_mod(a, f, p)
    while e:
        if e & 1:
            result = _fp_mulmod(result, a, f, p)
        e >>= 1
        if e:
            a = _fp_mulmod(a, a, f, p)
    return result


def _fp_gcd(a, b, p):
    a, b = _fp_trim(list(a)), _fp_trim(list(b))
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def _fp_sub(a, b, p):
    n = max(len(a), len(b))
    return _fp_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                     for i in range(n)])


def irreducible_mod_p(coeffs: Sequence[int], p: int) -> bool:
    """Rabin's test for a polynomial over F_p given by ascending coefficients."""
    f = _fp_trim([c % p for c in coeffs])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    for r in {q for q in range(2, n + 1) if n % q == 0 and all(q % s for s in range(2, q))}:
        h = _fp_powmod(x, p ** (n // r), f, p)
        if len(_fp_gcd(f, _fp_sub(h, x, p), p)) > 1:
            return False
    return _fp_sub(_fp_powmod(x, p ** n, f, p), x, p) == []


def _q_poly_certified(P: Polynomial) -> bool:
    for p in first_primes(CERTIFY_PRIMES):
        if any(c.denominator % p == 0 for c in P.coeffs):
            continue
        red = [c.numerator * pow(c.denominator, -1, p) % p for c in P.coeffs]
        if irreducible_mod_p(red, p):
            return True
    return False


def certify_irreducible(field: NumberField) -> bool:
    """Try to certify that ``field.min_poly`` is irreducible over its base."""
    f = field.min_poly
    if f.degree == 1:
        return True
    if field.base is QQ:
        return _q_poly_certified(f)
    B = field.base
    # Trager: if Nm(g(y - k*b)) is squarefree, g is irreducible over B iff the
    # norm is irreducible over Q
    for k in range(0, 6):
        shift = Polynomial([-(B.gen * k), 1], B)
        g = _compose(f, shift)
        N = norm_poly(g, B)
        if poly_gcd(N, N.derivative()).degree == 0:
            return _q_poly_certified(N)
    return False


def _compose(f: Polynomial, h: Polynomial) -> Polynomial:
    acc = Polynomial._make(f.ring, [])
    for c in reversed(f.coeffs):
        acc = acc * h + c
    return acc


def compose(f: Polynomial, h: Polynomial) -> Polynomial:
    """``f(h(t))``."""
    return _compose(f, h)
