"""Places, Frobenius samples, sheets and systems; the quasi-compatibility audit.

A :class:`RepSheet` stands for one lambda-adic representation: for each place
it records either an unramified sample ``(n, P)`` meaning "the charpoly of
F_x^n is P", or that the place is ramified, or that nothing is known.  A
:class:`System` is a family of sheets over one coefficient field.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .arith import is_prime, lcm
from .frobpoly import (CharPoly, dual_charpoly, hom_charpoly, power_charpoly,
                       sum_charpoly, tensor_charpoly)
from .numfield import QQ, Embedding, NumberField, embed_poly, minimal_polynomial, norm_poly

DEFAULT_N_MAX = 120

UNRAMIFIED = "unramified"
RAMIFIED = "ramified"
UNKNOWN = "unknown"
STATUSES = (UNRAMIFIED, RAMIFIED, UNKNOWN)


class DataError(ValueError):
    """Malformed or inconsistent Frobenius data (not an incompatibility)."""


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("FROBSYS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Place:
    label: str
    p: int
    f: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise DataError(f"place {self.label}: residue characteristic {self.p} is not prime")
        if self.f < 1:
            raise DataError(f"place {self.label}: residue degree must be >= 1")

    @property
    def q(self) -> int:
        return self.p ** self.f

    def sort_key(self):
        return (self.p, self.f, self.label)


@dataclass(frozen=True)
class FrobSample:
    """The charpoly of F_x^n at ``place`` is ``P``."""

    place: Place
    n: int
    P: CharPoly

    def __post_init__(self):
        if self.n < 1:
            raise DataError(f"sample at {self.place.label}: exponent must be >= 1")


@dataclass(frozen=True)
class Entry:
    place: Place
    status: str
    sample: FrobSample | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise DataError(f"unknown status {self.status!r}")
        if (self.status == UNRAMIFIED) != (self.sample is not None):
            raise DataError(f"place {self.place.label}: exactly the unramified entries "
                            "carry a sample")

    @classmethod
    def of(cls, sample: FrobSample) -> "Entry":
        return cls(sample.place, UNRAMIFIED, sample)


@dataclass(frozen=True)
class RepSheet:
    """Frobenius data of one lambda-adic representation.

    ``over`` is the chain of labels of places this lambda lies over, innermost
    first; ``over_label`` is its head.  ``notes`` holds auxiliary Q-level
    charpolys (for places where no E-rational sample was recorded).
    """

    field: object
    label: str
    ell: int
    entries: Mapping[str, Entry]
    over: tuple[str, ...] = ()
    dim: int | None = None
    notes: Mapping[str, CharPoly] = field(default_factory=dict)

    def __post_init__(self):
        if not is_prime(self.ell):
            raise DataError(f"sheet {self.label}: ell={self.ell} is not prime")
        entries = dict(self.entries)
        dims = set()
        for label, e in entries.items():
            if e.place.label != label:
                raise DataError(f"sheet {self.label}: entry key {label} != place label")
            if e.sample is not None:
                if e.sample.P.field != self.field:
                    raise DataError(f"sheet {self.label}, place {label}: sample is over "
                                    f"{e.sample.P.field.name}, sheet is over {self.field.name}")
                dims.add(e.sample.P.degree)
        if self.dim is not None:
            dims.add(self.dim)
        if len(dims) > 1:
            raise DataError(f"sheet {self.label}: inconsistent dimensions {sorted(dims)}")
        object.__setattr__(self, "dim", dims.pop() if dims else None)
        object.__setattr__(self, "entries", MappingProxyType(entries))
        object.__setattr__(self, "notes", MappingProxyType(dict(self.notes)))
        object.__setattr__(self, "over", tuple(self.over))

    @property
    def over_label(self) -> str | None:
        return self.over[0] if self.over else None

    def samples(self) -> list[FrobSample]:
        return [e.sample for e in self.entries.values() if e.sample is not None]


@dataclass(frozen=True)
class System:
    field: object
    sheets: tuple[RepSheet, ...]

    def __post_init__(self):
        sheets = tuple(self.sheets)
        object.__setattr__(self, "sheets", sheets)
        labels = [s.label for s in sheets]
        if len(set(labels)) != len(labels):
            raise DataError(f"duplicate sheet labels in {labels}")
        dims = {s.dim for s in sheets if s.dim is not None}
        for s in sheets:
            if s.field != self.field:
                raise DataError(f"sheet {s.label} is over {s.field.name}, system over "
                                f"{self.field.name}")
        if len(dims) > 1:
            raise DataError(f"inconsistent dimensions across sheets: {sorted(dims)}")

    @property
    def dim(self) -> int | None:
        dims = {s.dim for s in self.sheets if s.dim is not None}
        return dims.pop() if dims else None

    def sheet(self, label: str) -> RepSheet:
        for s in self.sheets:
            if s.label == label:
                return s
        raise KeyError(label)

    def places(self) -> list[Place]:
        seen: dict[str, Place] = {}
        for s in self.sheets:
            for e in s.entries.values():
                seen.setdefault(e.place.label, e.place)
        return sorted(seen.values(), key=Place.sort_key)


# ---------------------------------------------------------------------------
# levels and pairwise compatibility


def normalize_to_level(s: FrobSample, N: int) -> CharPoly:
    """Charpoly of F_x^N given a sample at exponent ``s.n`` dividing N."""
    if N < 1 or N % s.n:
        raise DataError(f"level {N} is not a multiple of the sample exponent {s.n}")
    return power_charpoly(s.P, N // s.n)


def _unramified(sheet: RepSheet, place_label: str) -> FrobSample:
    e = sheet.entries.get(place_label)
    if e is None:
        raise DataError(f"sheet {sheet.label} has no entry at {place_label}")
    if e.status != UNRAMIFIED:
        raise DataError(f"sheet {sheet.label} is {e.status} at {place_label}")
    return e.sample


def quasi_compatible_at(s1: RepSheet, s2: RepSheet, place_label: str,
                        n_max: int = DEFAULT_N_MAX) -> int | None:
    """Least level N <= n_max at which the two charpolys of F_x^N agree.

    N runs over multiples of lcm(n1, n2) in increasing order; None when no
    such level exists up to ``n_max``.
    """
    a = _unramified(s1, place_label)
    b = _unramified(s2, place_label)
    if a.P.degree != b.P.degree:
        raise DataError(f"degree mismatch at {place_label}: {a.P.degree} vs {b.P.degree}")
    if a.P.field != b.P.field:
        raise DataError(f"field mismatch at {place_label}")
    step = lcm(a.n, b.n)
    for N in range(step, n_max + 1, step):
        if normalize_to_level(a, N) == normalize_to_level(b, N):
            return N
    return None


class VerdictKind(str, Enum):
    COMPATIBLE = "compatible"
    INCOMPATIBLE = "incompatible"
    RESIDUE_CHAR_CLASH = "excluded_residue_char"
    RAMIFIED = "excluded_ramified"
    UNKNOWN = "excluded_unknown"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    level: int | None = None

    @property
    def excluded(self) -> bool:
        return self.kind not in (VerdictKind.COMPATIBLE, VerdictKind.INCOMPATIBLE)

    def __str__(self):
        if self.kind is VerdictKind.COMPATIBLE:
            return f"CompatibleAt({self.level})"
        if self.kind is VerdictKind.INCOMPATIBLE:
            return f"IncompatibleUpTo({self.level})"
        return {VerdictKind.RESIDUE_CHAR_CLASH: "ExcludedResidueCharClash",
                VerdictKind.RAMIFIED: "ExcludedRamified",
                VerdictKind.UNKNOWN: "ExcludedUnknown"}[self.kind]


@dataclass(frozen=True)
class CompatReport:
    """Verdict per (sheet pair, place), in pair order then place order."""

    cells: Mapping[tuple[str, str, str], Verdict]
    places: Mapping[str, Place]
    n_max: int
    strong_quasi_compatible: bool
    plain_quasi_compatible: bool

    @property
    def failures(self) -> list[tuple[str, str, str]]:
        return [k for k, v in self.cells.items() if v.kind is VerdictKind.INCOMPATIBLE]

    @property
    def first_failure(self) -> tuple[str, str, str] | None:
        fails = self.failures
        if not fails:
            return None
        return min(fails, key=lambda k: (self.places[k[2]].sort_key(), k[0], k[1]))

    def count(self, kind: VerdictKind) -> int:
        return sum(1 for v in self.cells.values() if v.kind is kind)


def _cell(s1: RepSheet, s2: RepSheet, place: Place, n_max: int) -> Verdict:
    if place.p in (s1.ell, s2.ell):
        return Verdict(VerdictKind.RESIDUE_CHAR_CLASH)
    e1, e2 = s1.entries.get(place.label), s2.entries.get(place.label)
    statuses = {e.status if e is not None else UNKNOWN for e in (e1, e2)}
    if RAMIFIED in statuses:
        return Verdict(VerdictKind.RAMIFIED)
    if UNKNOWN in statuses:
        return Verdict(VerdictKind.UNKNOWN)
    N = quasi_compatible_at(s1, s2, place.label, n_max)
    if N is None:
        return Verdict(VerdictKind.INCOMPATIBLE, n_max)
    return Verdict(VerdictKind.COMPATIBLE, N)


def _pair_plain(pairs_cells: list[tuple[Place, Verdict]]) -> bool:
    # data-scale stand-in for "compatible on a non-empty open U": every failure
    # lies below some compatible place, i.e. failures do not reach the top
    fails = [pl.sort_key() for pl, v in pairs_cells if v.kind is VerdictKind.INCOMPATIBLE]
    if not fails:
        return True
    good = [pl.sort_key() for pl, v in pairs_cells if v.kind is VerdictKind.COMPATIBLE]
    return bool(good) and max(good) > max(fails)


def check_system(system: System, n_max: int = DEFAULT_N_MAX,
                 workers: int | None = None) -> CompatReport:
    if not system.sheets:
        raise DataError("a system needs at least one sheet")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    jobs = []
    for s1, s2 in combinations(system.sheets, 2):
        labels = set(s1.entries) | set(s2.entries)
        pls = [(s1.entries.get(lb) or s2.entries[lb]).place for lb in labels]
        for pl in sorted(pls, key=Place.sort_key):
            jobs.append((s1, s2, pl))
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            verdicts = list(ex.map(lambda j: _cell(j[0], j[1], j[2], n_max), jobs))
    else:
        verdicts = [_cell(s1, s2, pl, n_max) for s1, s2, pl in jobs]
    cells: dict = {}
    places: dict = {}
    per_pair: dict = {}
    for (s1, s2, pl), v in zip(jobs, verdicts):
        cells[(s1.label, s2.label, pl.label)] = v
        places[pl.label] = pl
        per_pair.setdefault((s1.label, s2.label), []).append((pl, v))
    strong = all(v.kind is not VerdictKind.INCOMPATIBLE for v in verdicts)
    plain = all(_pair_plain(cs) for cs in per_pair.values())
    return CompatReport(MappingProxyType(cells), MappingProxyType(places), n_max,
                        strong, plain)


# ---------------------------------------------------------------------------
# base change, restriction and extension of the coefficient field


def base_change_sample(s: FrobSample, k: int) -> FrobSample:
    """Sample at the place of residue degree ``f*k`` above ``s.place``."""
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    pl = s.place
    new_place = Place(f"{pl.label}^{k}", pl.p, pl.f * k)
    return FrobSample(new_place, s.n, power_charpoly(s.P, k))


def _group_by_over(system: System) -> dict[str, list[RepSheet]]:
    groups: dict[str, list[RepSheet]] = {}
    for s in system.sheets:
        if s.over_label is None:
            raise DataError(f"sheet {s.label} has no over_label")
        groups.setdefault(s.over_label, []).append(s)
    return groups


def restrict_system(system: System, level_cap: int = DEFAULT_N_MAX) -> System:
    """Restrict the coefficient field from E to ``E.base``.

    Sheets are grouped by ``over_label``; at each place the group is brought to
    the lcm of its exponents and the new charpoly is the product over the group
    of the norms down to ``E.base``.  An Unknown place where every sheet of
    the group carries a note over ``E.base`` becomes the product of the notes.
    """
    E = system.field
    if not isinstance(E, NumberField):
        raise DataError("cannot restrict a system over Q")
    target = E.base
    groups = _group_by_over(system)
    sizes = {len(g) for g in groups.values()}
    if len(sizes) > 1:
        raise DataError(f"over_label groups have different sizes {sorted(sizes)}")
    new_sheets = []
    for over, group in groups.items():
        ells = {s.ell for s in group}
        if len(ells) > 1:
            raise DataError(f"group {over} mixes residue characteristics {sorted(ells)}")
        label_sets = {frozenset(s.entries) for s in group}
        if len(label_sets) > 1:
            raise DataError(f"group {over}: sheets cover different place sets")
        ref = group[0]
        entries = {}
        used: set[str] = set()
        for label, e0 in ref.entries.items():
            es = [s.entries[label] for s in group]
            st = {e.status for e in es}
            if RAMIFIED in st:
                entries[label] = Entry(e0.place, RAMIFIED)
                continue
            if UNKNOWN in st:
                notes = [s.notes.get(label) for s in group]
                if all(P is not None and P.field == target for P in notes):
                    # the Q-level charpolys kept as notes are exactly the restriction
                    prod = notes[0].poly
                    for P in notes[1:]:
                        prod = prod * P.poly
                    entries[label] = Entry.of(FrobSample(e0.place, 1, CharPoly(prod)))
                    used.add(label)
                else:
                    entries[label] = Entry(e0.place, UNKNOWN)
                continue
            N = lcm(*(e.sample.n for e in es))
            if N > level_cap:
                raise DataError(f"group {over}, place {label}: common level {N} exceeds "
                                f"cap {level_cap}")
            prod = None
            for e in es:
                nm = norm_poly(normalize_to_level(e.sample, N).poly)
                prod = nm if prod is None else prod * nm
            entries[label] = Entry.of(FrobSample(e0.place, N, CharPoly(prod)))
        dim = None if ref.dim is None else len(group) * ref.dim * E.degree
        new_sheets.append(RepSheet(target, over, ref.ell, entries, over=ref.over[1:],
                                   dim=dim,
                                   notes={k: v for k, v in ref.notes.items() if k not in used}))
    return System(target, tuple(new_sheets))


def extend_system(system: System, phi: Embedding,
                  fiber: Mapping[str, str] | None = None) -> System:
    """Extend coefficients along ``phi``; ``fiber`` maps new labels to old ones."""
    if phi.source != system.field:
        raise DataError("embedding source does not match the system field")
    if fiber is None:
        fiber = {s.label: s.label for s in system.sheets}
    old = {s.label: s for s in system.sheets}
    new_sheets = []
    for new_label, old_label in fiber.items():
        if old_label not in old:
            raise DataError(f"fiber references unknown sheet {old_label}")
        s = old[old_label]
        entries = {}
        for label, e in s.entries.items():
            if e.sample is None:
                entries[label] = e
            else:
                P = CharPoly(embed_poly(e.sample.P.poly, phi))
                entries[label] = Entry.of(replace(e.sample, P=P))
        new_sheets.append(RepSheet(phi.target, new_label, s.ell, entries,
                                   over=(s.label,) + s.over, dim=s.dim, notes=s.notes))
    return System(phi.target, tuple(new_sheets))


# ---------------------------------------------------------------------------
# placewise combinators

_BINARY = {"sum": sum_charpoly, "tensor": tensor_charpoly, "hom": hom_charpoly}
COMBINE_OPS = ("dual",) + tuple(_BINARY)


def _dim_of(op: str, d1, d2):
    if d1 is None or (op != "dual" and d2 is None):
        return None
    return {"dual": lambda: d1, "sum": lambda: d1 + d2,
            "tensor": lambda: d1 * d2, "hom": lambda: d1 * d2}[op]()


def combine_systems(op: str, system: System, other: System | None = None) -> System:
    """Placewise dual / direct sum / tensor product / internal Hom."""
    if op not in COMBINE_OPS:
        raise ValueError(f"unknown operation {op!r}; expected one of {COMBINE_OPS}")
    if op == "dual":
        sheets = []
        for s in system.sheets:
            entries = {lb: (Entry.of(replace(e.sample, P=dual_charpoly(e.sample.P)))
                            if e.sample else e) for lb, e in s.entries.items()}
            sheets.append(replace(s, entries=entries))
        return System(system.field, tuple(sheets))
    if other is None:
        raise ValueError(f"{op} needs two systems")
    if system.field != other.field:
        raise DataError("systems have different coefficient fields")
    labels = [s.label for s in system.sheets]
    if set(labels) != {s.label for s in other.sheets}:
        raise DataError("systems have different lambda-label sets")
    fn = _BINARY[op]
    sheets = []
    for s in system.sheets:
        t = other.sheet(s.label)
        if s.ell != t.ell:
            raise DataError(f"sheet {s.label}: residue characteristics differ")
        entries = {}
        all_labels = list(s.entries) + [lb for lb in t.entries if lb not in s.entries]
        for lb in all_labels:
            e1, e2 = s.entries.get(lb), t.entries.get(lb)
            place = (e1 or e2).place
            st = {e.status if e else UNKNOWN for e in (e1, e2)}
            if RAMIFIED in st:
                entries[lb] = Entry(place, RAMIFIED)
            elif UNKNOWN in st:
                entries[lb] = Entry(place, UNKNOWN)
            else:
                N = lcm(e1.sample.n, e2.sample.n)
                P = fn(normalize_to_level(e1.sample, N), normalize_to_level(e2.sample, N))
                entries[lb] = Entry.of(FrobSample(place, N, P))
        sheets.append(RepSheet(system.field, s.label, s.ell, entries, over=s.over,
                               dim=_dim_of(op, s.dim, t.dim)))
    return System(system.field, tuple(sheets))


# ---------------------------------------------------------------------------
# coefficient subfield


@dataclass(frozen=True)
class SubfieldDegree:
    """Lower bound for the degree over Q of the field generated by the
    selected charpoly coefficients, with elements attaining it."""

    degree: int
    witnesses: tuple


def coefficient_subfield_degree(sheet: RepSheet, places: Sequence[str] | None = None,
                                combinations_count: int = 8,
                                seed: int = 0) -> SubfieldDegree:
    chosen = sheet.samples() if places is None else [_unramified(sheet, lb) for lb in places]
    if not chosen:
        raise DataError("empty sample selection")
    coeffs = []
    for s in chosen:
        for c in s.P.coeffs[:-1]:
            if c not in coeffs:
                coeffs.append(c)
    rng = random.Random(seed)
    candidates = list(coeffs)
    for _ in range(combinations_count):
        acc = sheet.field.zero
        for c in coeffs:
            acc = acc + c * rng.randint(-3, 3)
        candidates.append(acc)
    best, witnesses = 0, []
    for c in candidates:
        d = minimal_polynomial(c).degree
        if d > best:
            best, witnesses = d, [c]
        elif d == best and c not in witnesses:
            witnesses.append(c)
    return SubfieldDegree(best, tuple(witnesses))


def system_from_sheets(sheets: Iterable[RepSheet]) -> System:
    sheets = tuple(sheets)
    if not sheets:
        raise DataError("empty system")
    return System(sheets[0].field, sheets)


__all__ = [
    "COMBINE_OPS", "CompatReport", "DataError", "DEFAULT_N_MAX", "Entry", "FrobSample",
    "Place", "RAMIFIED", "RepSheet", "STATUSES", "SubfieldDegree", "System", "UNKNOWN",
    "UNRAMIFIED", "Verdict", "VerdictKind", "base_change_sample", "check_system",
    "coefficient_subfield_degree", "combine_systems", "extend_system", "normalize_to_level",
    "quasi_compatible_at", "restrict_system", "system_from_sheets", "QQ",
]
