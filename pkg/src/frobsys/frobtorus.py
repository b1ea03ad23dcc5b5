"""Rank of the Frobenius torus from a charpoly.

The rank is the rank of the multiplicative group generated by the distinct
eigenvalues, modulo torsion: the number of distinct eigenvalues minus the
rank of the lattice of exponent vectors ``v`` with ``prod alpha_i^v_i`` a
root of unity.  Candidate relations come from LLL on the logarithms (moduli
and arguments) of numerically computed eigenvalues.  When the eigenvalues are
available exactly, each candidate is checked by exponentiating in the field
and testing against every admissible root-of-unity order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .arith import first_primes, lcm, orders_with_phi_at_most, squarefree_part as int_squarefree_part
from .frobpoly import CharPoly, power_charpoly
from .lattice import lll_reduce
from .numfield import QQ, NFElement, NumberField, Polynomial, poly_gcd
from .systems import FrobSample, worker_count

EXACT = "exact_in_field"
HEURISTIC = "heuristic"
MODES = (EXACT, HEURISTIC)
DEFAULT_PRECISION_BITS = 256
DEFAULT_RELATION_BOUND = 32
MAX_ESCALATION = 4


class TorusRankError(ValueError):
    pass


class NotSplitError(TorusRankError):
    """The charpoly does not split over its coefficient field."""


class PrecisionError(TorusRankError):
    """Numerical work failed at the requested precision."""


@dataclass(frozen=True)
class RelationLattice:
    dimension: int
    basis: tuple[tuple[int, ...], ...]
    verified: tuple[bool, ...]


@dataclass(frozen=True)
class TorusRankResult:
    rank_estimate: int
    rank_certified_upper: int
    certified: bool
    precision_bits_used: int
    relations: RelationLattice
    multiplicities: tuple[int, ...]
    splitting_field: str


# ---------------------------------------------------------------------------
# numerics


class _Embedding:
    """A fixed complex embedding of a tower, evaluated at the working precision."""

    def __init__(self, field):
        self.field = field
        if field is QQ:
            self.gen = None
            self.base = None
            return
        self.base = _Embedding(field.base)
        coeffs = [self.base(c) for c in reversed(field.min_poly.coeffs)]
        roots = _polyroots(coeffs)
        # deterministic choice: largest imaginary part, then largest real part
        self.gen = max(roots, key=lambda z: (float(mpmath.im(z)), float(mpmath.re(z))))

    def __call__(self, x):
        if self.field is QQ:
            x = Fraction(x)
            return mpmath.mpf(x.numerator) / x.denominator
        x = self.field(x)
        acc = mpmath.mpc(0)
        for c in reversed(x.coeffs):
            acc = acc * self.gen + self.base(c)
        return acc


def _polyroots(coeffs_desc):
    if len(coeffs_desc) == 2:
        return [-coeffs_desc[1] / coeffs_desc[0]]
    try:
        return mpmath.polyroots(coeffs_desc, maxsteps=400, extraprec=2 * mpmath.mp.prec)
    except mpmath.libmp.NoConvergence as exc:
        raise PrecisionError(f"root finding did not converge: {exc}") from exc


def _yun(P: Polynomial) -> list[tuple[Polynomial, int]]:
    """Squarefree decomposition ``P = prod A_k^k`` over a field of char 0."""
    out = []
    a = P.monic()
    b = a.derivative()
    c = poly_gcd(a, b)
    w = a.exact_div(c) if c.degree > 0 else a
    k = 1
    while w.degree > 0:
        y = poly_gcd(w, c)
        z = w.exact_div(y) if y.degree > 0 else w
        if z.degree > 0:
            out.append((z.monic(), k))
        w = y
        c = c.exact_div(y) if y.degree > 0 else c
        k += 1
    return out


def _as_complex(z):
    return mpmath.mpc(z)


def _slot_key(z):
    return (float(mpmath.re(z)), float(mpmath.im(z)))


# ---------------------------------------------------------------------------
# exact roots


def _absolute_basis(K) -> list:
    if K is QQ:
        return [Fraction(1)]
    d = K.absolute_degree
    return [K.from_absolute([Fraction(int(i == j)) for i in range(d)]) for j in range(d)]


def _recognize(z, K, basis, basis_vals, check, bits: int):
    """Try to write the complex number ``z`` as an element x of K with
    ``check(x)`` true; returns x or None."""
    C = mpmath.mpf(2) ** int(bits * 0.6)
    rows = []
    m = len(basis) + 1
    vals = list(basis_vals) + [z]
    for i, v in enumerate(vals):
        v = _as_complex(v)
        e = [0] * m
        e[i] = 1
        rows.append(e + [int(mpmath.nint(C * mpmath.re(v))), int(mpmath.nint(C * mpmath.im(v)))])
    try:
        red = lll_reduce(rows)
    except ValueError:
        return None
    for row in red:
        cz = row[m - 1]
        if cz == 0:
            continue
        acc = K.zero if K is not QQ else Fraction(0)
        for c, bvec in zip(row[:m - 1], basis):
            if c:
                acc = acc + bvec * c
        cand = -acc / cz if K is QQ else acc * Fraction(-1, cz)
        if check(cand):
            return cand
    return None


def _sqrt_rational(D: Fraction) -> Fraction | None:
    if D < 0:
        return None
    a, b = math.isqrt(D.numerator), math.isqrt(D.denominator)
    return Fraction(a, b) if a * a == D.numerator and b * b == D.denominator else None


def _nonsquare_certificate(D, E, prime_count: int = 300) -> int | None:
    """A prime p and a root r of E's min_poly mod p with D(r) a non-residue
    mod p proves that D is not a square in E (E over Q).  Returns p or None."""
    f = E.min_poly.coeffs
    dcoeffs = list(D.coeffs)
    for p in first_primes(prime_count)[1:]:
        dens = [c.denominator for c in f] + [c.denominator for c in dcoeffs]
        if any(d % p == 0 for d in dens):
            continue
        fm = [c.numerator * pow(c.denominator, -1, p) % p for c in f]
        dm = [c.numerator * pow(c.denominator, -1, p) % p for c in dcoeffs]
        for r in range(p):
            if sum(c * pow(r, j, p) for j, c in enumerate(fm)) % p:
                continue
            v = sum(c * pow(r, j, p) for j, c in enumerate(dm)) % p
            if v and pow(v, (p - 1) // 2, p) == p - 1:
                return p
    return None


class _Recognizer:
    """Numerical recognition of elements of E, checked exactly."""

    def __init__(self, E, bits: int):
        self.E = E
        self.bits = bits
        self._cache = {}

    def _setup(self, bits):
        if bits not in self._cache:
            with mpmath.workprec(bits):
                emb = _Embedding(self.E)
                basis = _absolute_basis(self.E)
                self._cache[bits] = (emb, basis, [emb(b) for b in basis])
        return self._cache[bits]

    def roots(self, A: Polynomial, escalate: int = 2) -> tuple[list, list, Polynomial]:
        """Split off linear factors, then quadratic ones, whose roots are
        found numerically at ``bits * 2**j`` (j < escalate) and confirmed exactly.
        Returns ``(roots, quadratic factors, cofactor)``."""
        E = self.E
        zero = E.zero
        found, quads, rest = [], [], A
        bits = self.bits
        for _ in range(escalate):
            if rest.degree <= 2:
                break
            emb, basis, vals = self._setup(bits)
            with mpmath.workprec(bits):
                zs = list(_polyroots([emb(c) for c in reversed(rest.coeffs)]))
                for z in zs:
                    if rest.degree <= 2:
                        break
                    r = _recognize(z, E, basis, vals, lambda x: rest(x) == zero, bits)
                    if r is not None:
                        found.append(r)
                        rest = rest.exact_div(Polynomial([-r, 1], E))
                if rest.degree > 2:
                    zs = list(_polyroots([emb(c) for c in reversed(rest.coeffs)]))
                    used = set()
                    for a in range(len(zs)):
                        for b in range(a + 1, len(zs)):
                            if rest.degree <= 2 or a in used or b in used:
                                continue
                            q = self._quadratic(zs[a], zs[b], rest, basis, vals, bits)
                            if q is not None:
                                quads.append(q)
                                rest = rest.exact_div(q)
                                used.update((a, b))
            bits *= 2
        return found, quads, rest

    def _quadratic(self, z1, z2, A, basis, vals, bits):
        E = self.E
        s = _recognize(z1 + z2, E, basis, vals, lambda x: True, bits)
        p = _recognize(z1 * z2, E, basis, vals, lambda x: True, bits)
        if s is None or p is None or not p:
            return None
        q = Polynomial([p, -s, E.one], E)
        return q if not (A % q) else None

    def sqrt(self, D):
        if self.E is QQ:
            return _sqrt_rational(Fraction(D))
        P = Polynomial([-D, 0, 1], self.E)
        for bits in (self.bits, 2 * self.bits):
            emb, basis, vals = self._setup(bits)
            with mpmath.workprec(bits):
                z = mpmath.sqrt(_as_complex(emb(D)))
                r = _recognize(z, self.E, basis, vals, lambda x: P(x) == self.E.zero, bits)
            if r is not None:
                return r
        return None


def _split_exact(P: Polynomial, bits: int):
    """Exact distinct roots of P with multiplicities, in P's field or a
    quadratic extension of it.  Returns ``(K, [(root, mult)])``.

    Linear and quadratic factors are solved exactly; larger factors are
    split by recognizing numerical roots as elements of E.
    """
    E = P.ring
    rec = _Recognizer(E, bits)
    found = []          # (root in E, mult)
    quads = []          # (monic quadratic over E without roots in E, mult, discriminant)

    def solve(A, k):
        if A.degree == 1:
            found.append((-A.coeffs[0], k))
        elif A.degree == 2:
            c0, c1, _ = A.coeffs
            D = c1 * c1 - 4 * c0
            s = rec.sqrt(D)
            if s is None:
                quads.append((A, k, D))
            else:
                found.append(((-c1 + s) * Fraction(1, 2), k))
                found.append(((-c1 - s) * Fraction(1, 2), k))
        else:
            roots, quads_found, rest = rec.roots(A)
            found.extend((r, k) for r in roots)
            for q in quads_found:
                solve(q, k)
            if rest.degree > 2:
                raise NotSplitError(f"no roots in {E.name} found for a factor of degree "
                                    f"{rest.degree} (at up to {2 * bits} bits)")
            if rest.degree > 0:
                solve(rest, k)

    for A, k in _yun(P):
        solve(A, k)
    if not quads:
        return E, found
    # adjoin one square root; every other discriminant must be a square multiple
    if E is not QQ and E.depth >= 2:
        raise NotSplitError("cannot adjoin a square root to a depth-2 field")
    D0 = quads[0][2]
    if E is QQ:
        D0 = Fraction(int_squarefree_part(D0.numerator * D0.denominator))
        K = NumberField([-D0, 0, 1], QQ, name=f"Q(sqrt({D0}))", gen_name=f"sqrt({D0})")
    else:
        if _nonsquare_certificate(D0, E) is None:
            raise PrecisionError(f"could not decide whether {D0!r} is a square in {E.name}")
        K = NumberField(Polynomial([-D0, 0, 1], E), E, name=f"{E.name}(sqrt)", gen_name="s",
                        certify=False)
    roots = [(K(r), k) for r, k in found]
    for A, k, D in quads:
        ratio = rec.sqrt(D / D0) if E is not QQ else _sqrt_rational(Fraction(D) / D0)
        if ratio is None:
            if E is not QQ and _nonsquare_certificate(D / D0, E) is None:
                raise PrecisionError(f"could not decide whether {D / D0!r} is a square in "
                                     f"{E.name}")
            raise NotSplitError("quadratic factors split over different quadratic extensions")
        sq = K.gen * K(ratio)
        c1 = K(A.coeffs[1])
        roots.append(((-c1 + sq) * Fraction(1, 2), k))
        roots.append(((-c1 - sq) * Fraction(1, 2), k))
    return K, roots


def _is_torsion(beta, K) -> int | None:
    one = K.one if K is not QQ else Fraction(1)
    deg = K.absolute_degree
    for m in orders_with_phi_at_most(deg):
        if beta ** m == one:
            return m
    return None


# ---------------------------------------------------------------------------
# relation search


def _candidate_relations(zs: Sequence, bits: int, bound: int) -> list[tuple[int, ...]]:
    r = len(zs)
    with mpmath.workprec(bits + 32):
        C = mpmath.mpf(2) ** int(bits * 0.75)
        tol = mpmath.mpf(2) ** (-int(bits * 0.5))
        logs = [mpmath.log(abs(z)) for z in zs]
        args = [mpmath.arg(z) / (2 * mpmath.pi) for z in zs]
        rows = []
        for i in range(r):
            e = [0] * (r + 1)
            e[i] = 1
            rows.append(e + [int(mpmath.nint(C * logs[i])), int(mpmath.nint(C * args[i]))])
        rows.append([0] * r + [1, 0, int(C)])
        red = lll_reduce(rows)
        out = []
        for row in red:
            v = row[:r]
            k0 = row[r]
            if not any(v) or max(abs(x) for x in v) > bound:
                continue
            s_log = mpmath.fsum(x * y for x, y in zip(v, logs))
            s_arg = mpmath.fsum(x * y for x, y in zip(v, args)) + k0
            if abs(s_log) < tol and abs(s_arg) < tol:
                g = math.gcd(*v)
                out.append(tuple(x // g for x in v))
    return out


def _rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _independent(vectors):
    kept = []
    for v in vectors:
        if _rank(kept + [v]) > len(kept):
            kept.append(v)
    return kept


def _verify(v, roots, K) -> bool:
    beta = K.one if K is not QQ else Fraction(1)
    for x, a in zip(v, roots):
        if x:
            beta = beta * (a ** x)
    return _is_torsion(beta, K) is not None


def torus_rank(P: CharPoly, mode: str = EXACT,
               precision_bits: int = DEFAULT_PRECISION_BITS,
               relation_bound: int = DEFAULT_RELATION_BOUND) -> TorusRankResult:
    """Rank of the Frobenius torus attached to the eigenvalues of ``P``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if precision_bits < 32:
        raise ValueError("precision_bits must be at least 32")
    E = P.field
    if mode == EXACT:
        K, exact = _split_exact(P.poly, precision_bits)
        with mpmath.workprec(precision_bits):
            emb = _Embedding(K)
            slots = sorted(((emb(r), r, k) for r, k in exact), key=lambda s: _slot_key(s[0]))
        zs = [s[0] for s in slots]
        roots = [s[1] for s in slots]
        mults = tuple(s[2] for s in slots)
        field_name = K.name
    else:
        with mpmath.workprec(precision_bits):
            emb = _Embedding(E)
            zs, mults_l = [], []
            for A, k in _yun(P.poly):
                for z in _polyroots([emb(c) for c in reversed(A.coeffs)]):
                    zs.append(_as_complex(z))
                    mults_l.append(k)
            order = sorted(range(len(zs)), key=lambda i: _slot_key(zs[i]))
            zs = [zs[i] for i in order]
            mults = tuple(mults_l[i] for i in order)
        roots, K, field_name = None, None, E.name
    for z in zs:
        if abs(z) == 0:
            raise PrecisionError("numerically zero eigenvalue")
    r = len(zs)
    if mode == HEURISTIC:
        basis = _independent(_candidate_relations(zs, precision_bits, relation_bound))
        lattice = RelationLattice(r, tuple(basis), tuple(False for _ in basis))
        return TorusRankResult(r - len(basis), r, False, precision_bits, lattice, mults,
                               field_name)

    # a candidate that fails the exact check is spurious: retry with more bits
    bits = precision_bits
    while True:
        basis, flags = _exact_search(zs, roots, K, bits, relation_bound)
        if all(flags) or bits >= MAX_ESCALATION * precision_bits:
            break
        bits *= 2
        zs = _embed_roots(K, roots, bits)
    verified = [v for v, ok in zip(basis, flags) if ok]
    upper = r - (_rank(verified) if verified else 0)

    # escalate once more: a second search at doubled precision must find nothing new
    used = bits
    all_ok = all(flags)
    if all_ok:
        used = 2 * bits
        basis2 = _independent(_candidate_relations(_embed_roots(K, roots, used), used,
                                                   relation_bound))
        stable = len(basis2) == len(basis) and _rank(basis + basis2) == len(basis)
        all_ok = stable and all(_verify(v, roots, K) for v in basis2)
    lattice = RelationLattice(r, tuple(basis), tuple(flags))
    return TorusRankResult(upper, upper, all_ok, used, lattice, mults, field_name)


def _embed_roots(K, roots, bits):
    with mpmath.workprec(bits):
        emb = _Embedding(K)
        return [emb(a) for a in roots]


def _exact_search(zs, roots, K, bits, bound):
    basis = _independent(_candidate_relations(zs, bits, bound))
    workers = worker_count()
    if workers > 1 and len(basis) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            flags = list(ex.map(lambda v: _verify(v, roots, K), basis))
    else:
        flags = [_verify(v, roots, K) for v in basis]
    return basis, flags


@dataclass(frozen=True)
class RankComparison:
    place: str
    level: int
    rows: tuple[tuple[str, int, TorusRankResult], ...]
    ranks_agree: bool
    all_certified: bool
    equal_degrees: bool


def rank_compare(samples: Sequence[tuple[str, FrobSample]], mode: str = EXACT,
                 precision_bits: int = DEFAULT_PRECISION_BITS,
                 relation_bound: int = DEFAULT_RELATION_BOUND) -> RankComparison:
    """Torus ranks of several lambda-samples at one place, at a common level."""
    if not samples:
        raise ValueError("no samples to compare")
    places = {s.place.label for _, s in samples}
    if len(places) != 1:
        raise ValueError(f"samples come from different places: {sorted(places)}")
    level = lcm(*(s.n for _, s in samples))
    rows = []
    for label, s in samples:
        P = power_charpoly(s.P, level // s.n)
        rows.append((label, P.degree,
                     torus_rank(P, mode, precision_bits, relation_bound)))
    ranks = {res.rank_estimate for _, _, res in rows}
    return RankComparison(places.pop(), level, tuple(rows), len(ranks) == 1,
                          all(res.certified for _, _, res in rows),
                          len({d for _, d, _ in rows}) == 1)


__all__ = [
    "DEFAULT_PRECISION_BITS", "DEFAULT_RELATION_BOUND", "EXACT", "HEURISTIC", "MODES",
    "NotSplitError", "PrecisionError", "RankComparison", "RelationLattice", "TorusRankError",
    "TorusRankResult", "rank_compare", "torus_rank", "NFElement",
]
