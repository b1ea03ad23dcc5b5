"""``frobsys`` command line.

Exit status: 0 success, 1 incompatible system, 2 bad input or violated
precondition, 3 numerical precision exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .cmhodge import (CMError, CMType, find_compatible_cm_type, format_cycles, half_twist,
                      half_twist_ladder, hodge_type_from_slots, level, parse_cycles,
                      parse_index_list, parse_slots, upper_set)
from .dataset import (DatasetError, decode_element, digest, dumps_dataset, loads_dataset,
                      record_line, verdict_records)
from .frobtorus import (DEFAULT_PRECISION_BITS, DEFAULT_RELATION_BOUND, MODES, EXACT,
                        PrecisionError, TorusRankError, rank_compare)
from .ingest import CurveError, build_cm_system, build_curve_sheet
from .numfield import QQ, Embedding, NumberField, Polynomial, parse_rational
from .systems import (COMBINE_OPS, DEFAULT_N_MAX, DataError, System, check_system,
                      combine_systems, extend_system, restrict_system, worker_count)

EXIT_OK, EXIT_INCOMPATIBLE, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _header(args, inputs: dict[str, bytes]) -> None:
    # a dataset written to stdout must stay parseable, so the header moves to stderr
    emit = _out
    if getattr(args, "out", "") in (None, "-"):
        emit = lambda line: sys.stderr.write(line + "\n")
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["threads"] = worker_count()
    emit(record_line({"kind": "config", "version": __version__, **cfg}))
    for path, data in inputs.items():
        emit(record_line({"kind": "input", "path": path, "sha256": digest(data)}))


def _read(path: str) -> tuple[System, bytes]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise DatasetError(f"cannot read: {exc.strerror}", None, path) from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetError("not UTF-8", None, path) from exc
    return loads_dataset(text, path), data


def _write(system: System, path: str | None) -> None:
    text = dumps_dataset(system)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    _out(record_line({"kind": "output", "path": path,
                      "sha256": digest(text.encode("utf-8"))}))


# ---------------------------------------------------------------------------
# subcommands


def cmd_count(args) -> int:
    if 4 * args.a**3 + 27 * args.b**2 == 0:
        raise CurveError(f"y^2 = x^3 + {args.a}x + {args.b} is singular (4a^3 + 27b^2 = 0)")
    _header(args, {})
    sheet = build_curve_sheet(args.a, args.b, args.p_max, label=args.label, ell=args.ell,
                              ext_degrees=tuple(args.ext_degrees), twist=args.twist_nonresidue)
    _write(System(QQ, (sheet,)), args.out)
    return EXIT_OK


def cmd_cm_fixture(args) -> int:
    if 4 * args.a**3 + 27 * args.b**2 == 0:
        raise CurveError("singular curve")
    if args.d <= 0:
        raise UsageError("--d must be positive (E = Q(sqrt(-d)))")
    _header(args, {})
    name, gen = ("Qi", "i") if args.d == 1 else (f"Q(sqrt(-{args.d}))", "u")
    E = NumberField([args.d, 0, 1], name=name, gen_name=gen)
    lambdas = tuple((f"lambda{ell}", ell) for ell in args.ells)
    system = build_cm_system(args.a, args.b, E, args.p_max, lambdas, conjugate=args.conjugate)
    _write(system, args.out)
    return EXIT_OK


def _merge(a: System, b: System) -> System:
    if a.field != b.field:
        raise DataError(f"inputs are over different fields ({a.field.name}, {b.field.name})")
    la, lb = {s.label for s in a.sheets}, {s.label for s in b.sheets}
    if la & lb:
        sa = tuple(replace(s, label="A:" + s.label) for s in a.sheets)
        sb = tuple(replace(s, label="B:" + s.label) for s in b.sheets)
        return System(a.field, sa + sb)
    return System(a.field, a.sheets + b.sheets)


def cmd_check(args) -> int:
    system, data = _read(args.file_a)
    inputs = {args.file_a: data}
    if args.file_b:
        other, data_b = _read(args.file_b)
        inputs[args.file_b] = data_b
        system = _merge(system, other)
    _header(args, inputs)
    report = check_system(system, n_max=args.n_max)
    ok = report.strong_quasi_compatible if args.strict else report.plain_quasi_compatible
    if args.format == "json":
        for line in verdict_records(report):
            _out(line)
    else:
        _out(f"{'pair':<28} {'place':>8}  verdict")
        for (l1, l2, pl), v in report.cells.items():
            _out(f"{l1 + ' ~ ' + l2:<28} {pl:>8}  {v}")
    first = report.first_failure
    summary = {"kind": "summary", "field": system.field.name, "sheets": len(system.sheets),
               "places": len(report.places), "n_max": report.n_max,
               "strong_quasi_compatible": report.strong_quasi_compatible,
               "plain_quasi_compatible": report.plain_quasi_compatible,
               "failures": len(report.failures)}
    if first is not None:
        summary["first_failure"] = {"pair": [first[0], first[1]], "place": first[2]}
    _out(record_line(summary))
    if not ok:
        if first is not None:
            _out(f"INCOMPATIBLE: first failing place {first[2]} "
                 f"({first[0]} vs {first[1]}, no common level up to {report.n_max})")
        else:
            _out("INCOMPATIBLE")
        return EXIT_INCOMPATIBLE
    mode = "strongly quasi-compatible" if args.strict else "quasi-compatible"
    _out(f"OK: {mode} over {len(report.places)} places")
    return EXIT_OK


def cmd_combine(args) -> int:
    system, data = _read(args.file_a)
    inputs = {args.file_a: data}
    other = None
    if args.op != "dual":
        if not args.file_b:
            raise UsageError(f"--op {args.op} needs two input files")
        other, data_b = _read(args.file_b)
        inputs[args.file_b] = data_b
    elif args.file_b:
        raise UsageError("--op dual takes one input file")
    _header(args, inputs)
    _write(combine_systems(args.op, system, other), args.out)
    return EXIT_OK


def cmd_restrict(args) -> int:
    system, data = _read(args.file)
    _header(args, {args.file: data})
    result = restrict_system(system, level_cap=args.level_cap)
    if args.field is not None:
        while result.field.name != args.field:
            if result.field is QQ:
                raise DataError(f"{args.field} is not in the tower of {system.field.name}")
            result = restrict_system(result, level_cap=args.level_cap)
    _write(result, args.out)
    return EXIT_OK


def _parse_field_arg(text: str, known: dict) -> NumberField:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--field must look like NAME:BASE:c0,c1,...[@gen]")
    name, base_name, rest = parts
    gen = "a"
    if "@" in rest:
        rest, gen = rest.split("@", 1)
    if base_name not in known:
        raise UsageError(f"unknown base field {base_name!r}; known: {sorted(known)}")
    base = known[base_name]
    if base is QQ:
        coeffs = [parse_rational(c) for c in rest.split(",")]
    else:
        coeffs = [decode_element(c, base) for c in json.loads("[" + rest + "]")]
    return NumberField(Polynomial(coeffs, base), base, name=name, gen_name=gen)


def cmd_extend(args) -> int:
    system, data = _read(args.file)
    known = {K.name: K for K in system.field.tower()}
    known["Q"] = QQ
    target = _parse_field_arg(args.field, known)
    src = system.field
    if args.embed is not None:
        image = decode_element(json.loads(args.embed), target)
        phi = Embedding(src, target, image)
    elif target.contains_field(src):
        phi = Embedding.inclusion(src, target)
    else:
        raise UsageError(f"--embed is required: {target.name} does not contain {src.name}")
    fiber = None
    if args.fiber:
        fiber = {}
        for item in args.fiber:
            new, _, old = item.partition("=")
            if not new or not old:
                raise UsageError(f"--fiber entries look like NEW=OLD, got {item!r}")
            fiber[new] = old
    _header(args, {args.file: data})
    _write(extend_system(system, phi, fiber), args.out)
    return EXIT_OK


def cmd_torus_rank(args) -> int:
    system, data = _read(args.file)
    _header(args, {args.file: data})
    places = args.place or [pl.label for pl in system.places()]
    _out(f"{'place':>8} {'sheet':<16} {'deg':>3} {'rank':>4} {'upper':>5} {'cert':>5} "
         f"{'bits':>5}  relations")
    all_agree = True
    for pl in places:
        samples = []
        for s in system.sheets:
            e = s.entries.get(pl)
            if e is not None and e.sample is not None:
                samples.append((s.label, e.sample))
        if not samples:
            _out(f"{pl:>8} (no unramified samples)")
            continue
        cmp = rank_compare(samples, args.mode, args.precision_bits, args.relation_bound)
        for label, deg, res in cmp.rows:
            rels = " ".join("(" + ",".join(map(str, v)) + ")" for v in res.relations.basis)
            _out(f"{pl:>8} {label:<16} {deg:>3} {res.rank_estimate:>4} "
                 f"{res.rank_certified_upper:>5} {str(res.certified).lower():>5} "
                 f"{res.precision_bits_used:>5}  {rels or '-'}")
            _out(record_line({"kind": "torus_rank", "place": pl, "sheet": label, "level": cmp.level,
                              "degree": deg, "rank": res.rank_estimate,
                              "rank_certified_upper": res.rank_certified_upper,
                              "certified": res.certified,
                              "precision_bits_used": res.precision_bits_used,
                              "field": res.splitting_field,
                              "relations": [list(v) for v in res.relations.basis]}))
        all_agree &= cmp.ranks_agree
        _out(record_line({"kind": "rank_compare", "place": pl, "level": cmp.level,
                          "ranks_agree": cmp.ranks_agree, "all_certified": cmp.all_certified,
                          "equal_degrees": cmp.equal_degrees}))
    _out(f"ranks agree across sheets: {str(all_agree).lower()}")
    return EXIT_OK


def cmd_halftwist(args) -> int:
    F = parse_cycles(args.dagger, args.sigma)
    V = hodge_type_from_slots(F, parse_slots(args.slots))
    _header(args, {})
    _out(f"start: weight {V.weight}, level {level(V)}, T = {sorted(upper_set(V))}")
    _out(f"involution {format_cycles(F)}")
    _out(f"{'step':>4}  {'phi':<16} {'weight':>6} {'level':>5}  slots")
    _out(f"{0:>4}  {'-':<16} {V.weight:>6} {level(V):>5}  {V}")
    if args.ladder:
        if args.phi is not None:
            raise UsageError("--phi and --ladder are exclusive")
        steps = [(st.phi, st.result, st.strict) for st in half_twist_ladder(V)]
    else:
        if args.phi is not None:
            phi = CMType(F, parse_index_list(args.phi))
        else:
            phi = find_compatible_cm_type(V)
            if phi is None:
                raise CMError("T meets its conjugate: no CM type avoids T")
        steps = [(phi, half_twist(V, phi), True)]
    for i, (phi, W, strict) in enumerate(steps, 1):
        mark = "" if strict else "  (top-set rule)"
        _out(f"{i:>4}  {str(phi):<16} {W.weight:>6} {level(W):>5}  {W}{mark}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frobsys",
                                 description="Audit compatible systems of Frobenius data.")
    ap.add_argument("--version", action="version", version=f"frobsys {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count points on y^2 = x^3 + ax + b and write a dataset")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--p-max", type=int, required=True, help="use primes 5 <= p < P_MAX")
    p.add_argument("--ext-degrees", type=int, nargs="*", default=[])
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--label", default="rho")
    p.add_argument("--twist-nonresidue", action="store_true",
                   help="at each p use the twist by the least non-residue mod p")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("cm-fixture", help="lambda-sheets over Q(sqrt(-d)) from a CM curve")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--p-max", type=int, required=True)
    p.add_argument("--ells", type=int, nargs="+", default=[3, 7])
    p.add_argument("--conjugate", action="store_true",
                   help="give later sheets t - conj(pi) (negative control)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cm_fixture)

    p = sub.add_parser("check", help="quasi-compatibility report")
    p.add_argument("file_a")
    p.add_argument("file_b", nargs="?")
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.add_argument("--strict", action="store_true", help="require strong quasi-compatibility")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("combine", help="placewise dual / sum / tensor / hom")
    p.add_argument("--op", choices=COMBINE_OPS, required=True)
    p.add_argument("file_a")
    p.add_argument("file_b", nargs="?")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("restrict", help="restrict coefficients to a subfield (norms)")
    p.add_argument("file")
    p.add_argument("--field", default=None, help="target field name (default: the base)")
    p.add_argument("--level-cap", type=int, default=DEFAULT_N_MAX)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("extend", help="extend coefficients along an embedding")
    p.add_argument("file")
    p.add_argument("--field", required=True, help="NAME:BASE:c0,c1,... (min poly over BASE)")
    p.add_argument("--embed", default=None,
                   help="image of the source generator, as a JSON element encoding")
    p.add_argument("--fiber", nargs="*", default=None, help="NEW=OLD sheet labels")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("torus-rank", help="Frobenius torus ranks per sheet and place")
    p.add_argument("file")
    p.add_argument("--place", action="append", default=None)
    p.add_argument("--mode", choices=MODES, default=EXACT)
    p.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION_BITS)
    p.add_argument("--relation-bound", type=int, default=DEFAULT_RELATION_BOUND)
    p.set_defaults(func=cmd_torus_rank)

    p = sub.add_parser("halftwist", help="half-twist a rank-one E-Hodge type")
    p.add_argument("--sigma", type=int, default=None, help="number of embeddings (2g)")
    p.add_argument("--dagger", required=True, help="involution in cycle notation, e.g. '(0 2)(1 3)'")
    p.add_argument("--slots", required=True, help="bidegrees, e.g. '0:(1,0) 1:(0,1)'")
    p.add_argument("--phi", default=None, help="CM type as an index list, e.g. '2,3'")
    p.add_argument("--ladder", action="store_true")
    p.set_defaults(func=cmd_halftwist)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PrecisionError as exc:
        _err(f"precision exhausted: {exc}")
        return EXIT_PRECISION
    except (DataError, CurveError, CMError, TorusRankError, UsageError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT


def _err(msg: str) -> None:
    sys.stderr.write(f"frobsys: error: {msg}\n")


if __name__ == "__main__":
    sys.exit(main())
