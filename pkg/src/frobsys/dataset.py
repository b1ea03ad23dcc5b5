"""Line-delimited JSON datasets of Frobenius data.

One record per line, in this order: fields (tower order), then for each sheet
its ``sheet`` record followed by its ``sample`` and ``note`` records.

    {"kind":"field","name":"Qi","base":"Q","gen":"i","min_poly":["1","0","1"]}
    {"kind":"sheet","label":"lambda3","field":"Qi","ell":3,"over":["l3"],"dim":1}
    {"kind":"sample","sheet":"lambda3","place":"5","p":5,"f":1,"q":5,"n":1,"status":"unramified","coeffs":[["-1","-2"]]}
    {"kind":"note","sheet":"lambda3","place":"7","field":"Q","coeffs":["7","0"]}

Rationals are strings ``"num/den"`` (lowest terms) or ``"num"``; an element of
a number field is the list of encodings of its coefficients over the base.
Sample and note polynomials are monic and stored ascending without the
leading 1.  Ramified and unknown entries carry neither ``n`` nor ``coeffs``.
Writing is canonical, so store -> load -> store is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .frobpoly import CharPoly, CharPolyError
from .numfield import QQ, NumberField, Polynomial, format_rational, parse_rational
from .systems import (STATUSES, UNRAMIFIED, CompatReport, DataError, Entry, FrobSample,
                      Place, RepSheet, System)


class DatasetError(DataError):
    def __init__(self, reason: str, line: int | None = None, path=None):
        self.reason = reason
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + reason)


# ---------------------------------------------------------------------------
# element encodings


def encode_element(x, field):
    if field is QQ:
        return format_rational(x)
    x = field(x)
    return [encode_element(c, field.base) for c in x.coeffs]


def decode_element(obj, field):
    if field is QQ:
        if not isinstance(obj, str):
            raise ValueError(f"rational must be a string, got {obj!r}")
        return parse_rational(obj)
    if not isinstance(obj, list) or len(obj) != field.degree:
        raise ValueError(f"{field.name} element must be a list of {field.degree} coefficients")
    return field([decode_element(c, field.base) for c in obj])


def encode_charpoly(P: CharPoly) -> list:
    return [encode_element(c, P.field) for c in P.coeffs[:-1]]


def decode_charpoly(obj, field) -> CharPoly:
    if not isinstance(obj, list) or not obj:
        raise ValueError("coeffs must be a non-empty list")
    cs = [decode_element(c, field) for c in obj] + [field.one]
    return CharPoly(Polynomial(cs, field))


def _dumps(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"), ensure_ascii=False)


# ---------------------------------------------------------------------------
# writing


def field_records(field) -> list[dict]:
    out = []
    for K in field.tower():
        if K is QQ:
            continue
        out.append({"kind": "field", "name": K.name, "base": K.base.name, "gen": K.gen_name,
                    "min_poly": [encode_element(c, K.base) for c in K.min_poly.coeffs]})
    return out


def _sheet_records(s: RepSheet) -> list[dict]:
    out = [{"kind": "sheet", "label": s.label, "field": s.field.name, "ell": s.ell,
            "over": list(s.over), "dim": s.dim}]
    for label, e in s.entries.items():
        pl = e.place
        rec = {"kind": "sample", "sheet": s.label, "place": label, "p": pl.p, "f": pl.f,
               "q": pl.q}
        if e.sample is not None:
            rec["n"] = e.sample.n
        rec["status"] = e.status
        if e.sample is not None:
            rec["coeffs"] = encode_charpoly(e.sample.P)
        out.append(rec)
    for label, P in s.notes.items():
        out.append({"kind": "note", "sheet": s.label, "place": label, "field": P.field.name,
                    "coeffs": encode_charpoly(P)})
    return out


def dumps_dataset(system: System) -> str:
    records = field_records(system.field)
    declared = {r["name"] for r in records}
    for s in system.sheets:
        for P in s.notes.values():
            for r in field_records(P.field):
                if r["name"] not in declared:
                    declared.add(r["name"])
                    records.append(r)
    for s in system.sheets:
        records.extend(_sheet_records(s))
    return "".join(_dumps(r) + "\n" for r in records)


def store_dataset(system: System, path) -> None:
    Path(path).write_text(dumps_dataset(system), encoding="utf-8")


# ---------------------------------------------------------------------------
# reading

_KEYS = {
    "field": ({"name", "base", "min_poly"}, {"gen"}),
    "sheet": ({"label", "field", "ell"}, {"over", "dim"}),
    "sample": ({"sheet", "place", "p", "status"}, {"f", "q", "n", "coeffs"}),
    "note": ({"sheet", "place", "coeffs"}, {"field"}),
}


def _int(rec, key, default=None):
    v = rec.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ValueError(f"{key!r} must be an integer, got {v!r}")
    return v


def _str(rec, key):
    v = rec[key]
    if not isinstance(v, str) or not v:
        raise ValueError(f"{key!r} must be a non-empty string, got {v!r}")
    return v


class _Loader:
    def __init__(self):
        self.fields = {"Q": QQ}
        self.sheets: dict[str, dict] = {}
        self.places: dict[str, Place] = {}

    def field(self, name):
        if name not in self.fields:
            raise ValueError(f"unknown field {name!r}")
        return self.fields[name]

    def add(self, rec):
        if not isinstance(rec, dict):
            raise ValueError("record must be a JSON object")
        kind = rec.get("kind")
        if kind not in _KEYS:
            raise ValueError(f"unknown record kind {kind!r}")
        required, optional = _KEYS[kind]
        missing = required - set(rec)
        if missing:
            raise ValueError(f"{kind} record is missing {sorted(missing)}")
        extra = set(rec) - required - optional - {"kind"}
        if extra:
            raise ValueError(f"{kind} record has unexpected keys {sorted(extra)}")
        getattr(self, "_" + kind)(rec)

    def _field(self, rec):
        name = _str(rec, "name")
        if name in self.fields:
            raise ValueError(f"field {name!r} declared twice")
        base = self.field(rec["base"])
        mp = rec["min_poly"]
        if not isinstance(mp, list) or len(mp) < 2:
            raise ValueError("min_poly must list at least two coefficients")
        poly = Polynomial([decode_element(c, base) for c in mp], base)
        if len(poly.coeffs) != len(mp):
            raise ValueError("min_poly has a zero leading coefficient")
        gen = rec.get("gen", "a")
        if not isinstance(gen, str) or not gen:
            raise ValueError("gen must be a non-empty string")
        self.fields[name] = NumberField(poly, base, name=name, gen_name=gen)

    def _sheet(self, rec):
        label = _str(rec, "label")
        if label in self.sheets:
            raise ValueError(f"sheet {label!r} declared twice")
        over = rec.get("over", [])
        if not isinstance(over, list) or not all(isinstance(x, str) for x in over):
            raise ValueError("over must be a list of labels")
        dim = rec.get("dim")
        if dim is not None:
            dim = _int(rec, "dim")
        self.sheets[label] = {"field": self.field(rec["field"]), "label": label,
                              "ell": _int(rec, "ell"), "over": tuple(over), "dim": dim,
                              "entries": {}, "notes": {}}

    def _sheet_for(self, rec):
        label = rec["sheet"]
        if label not in self.sheets:
            raise ValueError(f"unknown sheet {label!r}")
        return self.sheets[label]

    def _sample(self, rec):
        sh = self._sheet_for(rec)
        label = _str(rec, "place")
        p, f = _int(rec, "p"), _int(rec, "f", 1)
        if "q" in rec and _int(rec, "q") != p ** f:
            raise ValueError(f"q = {rec['q']} but p^f = {p}^{f} = {p ** f}")
        place = Place(label, p, f)
        known = self.places.setdefault(label, place)
        if known != place:
            raise ValueError(f"place {label!r} redeclared with different (p, f)")
        if label in sh["entries"]:
            raise ValueError(f"sheet {sh['label']!r} has two records for place {label!r}")
        status = rec["status"]
        if status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")
        if status == UNRAMIFIED:
            if "coeffs" not in rec:
                raise ValueError("unramified sample needs coeffs")
            P = decode_charpoly(rec["coeffs"], sh["field"])
            entry = Entry.of(FrobSample(place, _int(rec, "n", 1), P))
        else:
            if "coeffs" in rec or "n" in rec:
                raise ValueError(f"{status} entries carry no polynomial")
            entry = Entry(place, status)
        sh["entries"][label] = entry

    def _note(self, rec):
        sh = self._sheet_for(rec)
        label = _str(rec, "place")
        field = self.field(rec.get("field", "Q"))
        if label in sh["notes"]:
            raise ValueError(f"sheet {sh['label']!r} has two notes for place {label!r}")
        sh["notes"][label] = decode_charpoly(rec["coeffs"], field)

    def system(self) -> System:
        if not self.sheets:
            raise ValueError("dataset declares no sheets (empty system)")
        sheets = tuple(RepSheet(**d) for d in self.sheets.values())
        return System(sheets[0].field, sheets)


def loads_dataset(text: str, path=None) -> System:
    loader = _Loader()
    lineno = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            loader.add(json.loads(line))
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON: {exc.msg}", lineno, path) from exc
        except (ValueError, TypeError, CharPolyError) as exc:
            raise DatasetError(str(exc), lineno, path) from exc
    try:
        return loader.system()
    except (ValueError, TypeError) as exc:
        raise DatasetError(str(exc), None, path) from exc


def load_dataset(path) -> System:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetError(f"not UTF-8: {exc}", None, path) from exc
    return loads_dataset(text, path)


# ---------------------------------------------------------------------------
# reports


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def verdict_records(report: CompatReport) -> list[str]:
    out = []
    for (l1, l2, pl), v in report.cells.items():
        rec = {"kind": "verdict", "pair": [l1, l2], "place": pl, "verdict": v.kind.value}
        if v.level is not None:
            rec["level"] = v.level
        out.append(_dumps(rec))
    return out


def record_line(record: dict) -> str:
    return _dumps(record)


__all__ = [
    "DatasetError", "decode_charpoly", "decode_element", "digest", "dumps_dataset",
    "encode_charpoly", "encode_element", "field_records", "load_dataset", "loads_dataset",
    "record_line", "store_dataset", "verdict_records",
]
