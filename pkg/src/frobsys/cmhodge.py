"""CM types, rank-one E-Hodge types and half-twists.

Embeddings of the CM field are abstract indices ``0..2g-1`` with a
fixed-point-free involution ``dagger``.  A rank-one E-Hodge type assigns a
bidegree ``(p, q)`` to every embedding; complex conjugation swaps the
bidegrees of ``s`` and ``dagger(s)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class CMError(ValueError):
    pass


@dataclass(frozen=True)
class CMField:
    size: int
    dagger: tuple[int, ...]

    def __post_init__(self):
        if self.size <= 0 or self.size % 2:
            raise CMError(f"size must be a positive even integer, got {self.size}")
        d = tuple(self.dagger)
        object.__setattr__(self, "dagger", d)
        if sorted(d) != list(range(self.size)):
            raise CMError("dagger must be a permutation of 0..size-1")
        for s in range(self.size):
            if d[s] == s:
                raise CMError(f"dagger fixes {s}")
            if d[d[s]] != s:
                raise CMError("dagger is not an involution")

    @classmethod
    def standard(cls, g: int) -> "CMField":
        """Pairing ``i <-> i + g``."""
        return cls(2 * g, tuple((i + g) % (2 * g) for i in range(2 * g)))

    @property
    def sigma(self) -> range:
        return range(self.size)

    @property
    def g(self) -> int:
        return self.size // 2

    def pairs(self) -> list[tuple[int, int]]:
        return sorted({(min(s, self.dagger[s]), max(s, self.dagger[s])) for s in self.sigma})

    def dag(self, subset: Iterable[int]) -> frozenset[int]:
        return frozenset(self.dagger[s] for s in subset)

    def cm_types(self) -> list["CMType"]:
        out = []
        for choice in itertools.product((0, 1), repeat=self.g):
            out.append(CMType(self, frozenset(pr[c] for pr, c in zip(self.pairs(), choice))))
        return out


@dataclass(frozen=True)
class CMType:
    field: CMField
    phi: frozenset[int]

    def __post_init__(self):
        phi = frozenset(self.phi)
        object.__setattr__(self, "phi", phi)
        if not phi <= set(self.field.sigma):
            raise CMError(f"indices out of range: {sorted(phi)}")
        for s in self.field.sigma:
            if (s in phi) == (self.field.dagger[s] in phi):
                raise CMError(f"exactly one of {s}, {self.field.dagger[s]} must lie in the CM type")

    def conjugate(self) -> frozenset[int]:
        return self.field.dag(self.phi)

    def __str__(self):
        return "{" + ",".join(map(str, sorted(self.phi))) + "}"


@dataclass(frozen=True)
class EHodgeType:
    field: CMField
    weight: int
    bidegree: Mapping[int, tuple[int, int]]

    def __post_init__(self):
        bd = {int(s): (int(p), int(q)) for s, (p, q) in dict(self.bidegree).items()}
        if set(bd) != set(self.field.sigma):
            raise CMError("bidegree must be given for every embedding")
        for s, (p, q) in bd.items():
            if p + q != self.weight:
                raise CMError(f"slot {s}: p + q = {p + q} != weight {self.weight}")
            if bd[self.field.dagger[s]] != (q, p):
                raise CMError(f"slots {s} and {self.field.dagger[s]} are not swapped by conjugation")
        object.__setattr__(self, "bidegree", tuple(sorted(bd.items())))

    def slot(self, s: int) -> tuple[int, int]:
        return dict(self.bidegree)[s]

    def slots(self) -> dict[int, tuple[int, int]]:
        return dict(self.bidegree)

    def __str__(self):
        return " ".join(f"{s}:({p},{q})" for s, (p, q) in self.bidegree)


def level(V: EHodgeType) -> int:
    return max(p - q for _, (p, q) in V.bidegree)


def upper_set(V: EHodgeType) -> frozenset[int]:
    half = -(-V.weight // 2)
    return frozenset(s for s, (p, _) in V.bidegree if p >= half)


def top_set(V: EHodgeType) -> frozenset[int]:
    """Embeddings where ``p - q >= level - 1``; these must avoid the CM type
    for a twist to lower the level."""
    m = level(V)
    return frozenset(s for s, (p, q) in V.bidegree if p - q >= m - 1)


def cm_type_hodge(phi: CMType) -> EHodgeType:
    return EHodgeType(phi.field, 1,
                      {s: ((1, 0) if s in phi.phi else (0, 1)) for s in phi.field.sigma})


def half_twist(V: EHodgeType, phi: CMType, strict: bool = True) -> EHodgeType:
    """``E_phi (x)_E V``: add (1,0) on the CM type and (0,1) off it.

    With ``strict`` the CM type must avoid the full upper set; otherwise
    it only has to avoid :func:`top_set`.
    """
    if phi.field != V.field:
        raise CMError("CM type and Hodge type live on different CM fields")
    m = level(V)
    if m < 1:
        raise CMError("level 0: nothing to lower")
    avoid = upper_set(V) if strict else top_set(V)
    clash = avoid & phi.phi
    if clash:
        name = "T" if strict else "S"
        raise CMError(f"{name} meets the CM type at {sorted(clash)}")
    W = EHodgeType(V.field, V.weight + 1,
                   {s: ((p + 1, q) if s in phi.phi else (p, q + 1)) for s, (p, q) in V.bidegree})
    assert W.weight == V.weight + 1 and level(W) == m - 1, (str(V), str(phi), str(W))
    return W


def _least_type_containing(field: CMField, forced: frozenset[int]) -> CMType | None:
    if forced & field.dag(forced):
        return None
    phi = set(forced)
    for a, b in field.pairs():
        if a not in phi and b not in phi:
            phi.add(a)
    return CMType(field, frozenset(phi))


def find_compatible_cm_type(V: EHodgeType) -> CMType | None:
    """Least CM type disjoint from the upper set, or None when T meets T-dagger."""
    T = upper_set(V)
    if T & V.field.dag(T):
        return None
    return _least_type_containing(V.field, V.field.dag(T))


@dataclass(frozen=True)
class LadderStep:
    phi: CMType
    result: EHodgeType
    strict: bool


def half_twist_ladder(V: EHodgeType) -> list[LadderStep]:
    """Half-twist down to level 0.

    When the upper set meets its conjugate (even weight with a middle slot
    ``(n/2, n/2)``) the step falls back to a CM type avoiding only the
    top set, which still lowers the level by one.
    """
    steps = []
    cur = V
    while level(cur) > 0:
        phi = find_compatible_cm_type(cur)
        strict = phi is not None
        if phi is None:
            S = top_set(cur)
            phi = _least_type_containing(cur.field, cur.field.dag(S))
            assert phi is not None, f"top set meets its conjugate: {cur}"
        cur = half_twist(cur, phi, strict=strict)
        steps.append(LadderStep(phi, cur, strict))
    assert len(steps) == level(V)
    return steps


# ---------------------------------------------------------------------------
# text encodings


def parse_cycles(text: str, size: int | None = None) -> CMField:
    """``"(0 2)(1 3)"`` -> CMField; every index must appear in a 2-cycle."""
    cycles = re.findall(r"\(([^()]*)\)", text)
    if not cycles or re.sub(r"\([^()]*\)", "", text).strip():
        raise CMError(f"cannot parse involution {text!r}")
    pairs = []
    for c in cycles:
        parts = [int(x) for x in re.split(r"[\s,]+", c.strip()) if x]
        if len(parts) != 2:
            raise CMError(f"involution cycles must have length 2: ({c})")
        pairs.append(parts)
    n = size if size is not None else 2 * len(pairs)
    perm = [None] * n
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise CMError(f"index out of range in ({a} {b})")
        if perm[a] is not None or perm[b] is not None:
            raise CMError(f"index repeated in ({a} {b})")
        perm[a], perm[b] = b, a
    if any(x is None for x in perm):
        raise CMError("involution does not cover every index")
    return CMField(n, tuple(perm))


def format_cycles(field: CMField) -> str:
    return "".join(f"({a} {b})" for a, b in field.pairs())


def parse_index_list(text: str) -> frozenset[int]:
    text = text.strip().strip("{}[]")
    return frozenset(int(x) for x in re.split(r"[\s,]+", text) if x)


def parse_slots(text: str) -> dict[int, tuple[int, int]]:
    """``"0:1,0;1:0,1"`` or ``"0:(1,0) 1:(0,1)"`` -> {0: (1, 0), 1: (0, 1)}."""
    out = {}
    for m in re.finditer(r"(\d+)\s*:\s*\(?\s*(-?\d+)\s*,\s*(-?\d+)\s*\)?", text):
        s = int(m.group(1))
        if s in out:
            raise CMError(f"slot {s} given twice")
        out[s] = (int(m.group(2)), int(m.group(3)))
    if not out:
        raise CMError(f"cannot parse slots {text!r}")
    return out


def hodge_type_from_slots(field: CMField, slots: Mapping[int, Sequence[int]]) -> EHodgeType:
    weights = {p + q for p, q in slots.values()}
    if len(weights) != 1:
        raise CMError(f"slots have different weights: {sorted(weights)}")
    return EHodgeType(field, weights.pop(), dict(slots))


__all__ = [
    "CMError", "CMField", "CMType", "EHodgeType", "LadderStep", "cm_type_hodge",
    "find_compatible_cm_type", "format_cycles", "half_twist", "half_twist_ladder",
    "hodge_type_from_slots", "level", "parse_cycles", "parse_index_list", "parse_slots",
    "top_set", "upper_set",
]
