"""Deterministic command-line front end.

Subcommands:

* symbols        -- symbol dimensions per degree for a pseudogroup
* cohomology     -- cohomology tables (spencer | restricted | stationary |
                    obstruction | covariant), cells keyed sym,form degree
* covariants     -- per-degree covariant reports for a flag
* transversality -- covariant scan with the classification flags
* oracle         -- closed-form vs brute-force dimension comparison
* tresse         -- invariant-derivative evaluation at a rational point

JSON output is canonical: sorted keys, embedded run configuration,
artifact version and seed; rerunning the same configuration produces
byte-identical files.  CSV is a lossy flat projection.  Exit codes:
0 success, 2 usage error, 3 precondition failure, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import __version__
from .errors import (AmbientMismatch, CancellationFailure, CapExceeded,
                     DegreeUnderflow, EquationNotInvariant, MissingGrade,
                     NotASubcomplex, NotASubspace, ParamOutOfRange,
                     ShapeMismatch, SingularJacobian, UnsupportedDegree,
                     ZeroVector)
from .exactla import Subspace, TensorShape
from .symbolic import CohomologyTable, SymbolicSystem, spencer_table
from .covariants import (FlagContext, covariant_cohomology, covariants,
                         restricted_spencer_H, stationary_row_cohomology,
                         transversality_scan)
from .catalog import (GEOMETRIC_KINDS, PseudogroupSpec, contact_lie_dim,
                      parse_pseudogroup, point_lie_total, stratum_tau,
                      symbol_dim, system, volume_claimed_dim)
from .jetcalc import (JetPoint, RationalLCG, TresseFrame, parse_jet_polynomial,
                      parse_variable, symbol_oracle, tresse)

USAGE_ERRORS = (ParamOutOfRange, ValueError, KeyError)
PRECONDITION_ERRORS = (SingularJacobian, EquationNotInvariant, NotASubcomplex,
                       NotASubspace, ShapeMismatch, AmbientMismatch,
                       DegreeUnderflow, MissingGrade, ZeroVector,
                       CancellationFailure)
CAP_ERRORS = (CapExceeded, UnsupportedDegree)


def _parse_range(text: str) -> Tuple[int, int]:
    lo, sep, hi = text.partition("..")
    a = int(lo)
    b = int(hi) if sep else a
    if b < a:
        raise ParamOutOfRange("empty range %r" % text)
    return a, b


def _parse_flag(text: str, spec: PseudogroupSpec) -> FlagContext:
    key, eq, val = text.partition("=")
    if not eq:
        raise ParamOutOfRange("flag must be stratum=<name> or tau=<rows>")
    m = spec.ambient_dim
    if key == "stratum":
        return FlagContext(m, stratum_tau(spec, val.strip()))
    if key == "tau":
        rows = [[Fraction(x) for x in row.split(",")]
                for row in val.split(";")]
        return FlagContext(m, rows)
    raise ParamOutOfRange("unknown flag key %r" % key)


def _load_h_system(path: str, ctx: FlagContext) -> SymbolicSystem:
    with open(path) as fh:
        doc = json.load(fh)
    amb = doc.get("ambient", {})
    if amb.get("m") != ctx.m or amb.get("n") != ctx.n:
        raise ParamOutOfRange("h-file ambient (m, n) does not match the flag")
    if "tau_basis" in doc:
        given = tuple(tuple(Fraction(str(x)) for x in row)
                      for row in doc["tau_basis"])
        if given != ctx.tau:
            raise ParamOutOfRange("h-file tau basis does not match the flag")
    grades: Dict[int, Subspace] = {}
    for key, rows in doc.get("h", {}).items():
        l = int(key)
        shp = TensorShape(ctx.n, l, 0, ctx.r)
        grades[l] = Subspace.from_dense(
            shp, [[Fraction(str(v)) for v in row] for row in rows])
    return SymbolicSystem(ctx.n, ctx.r, grades)


def _emit(args, payload: Dict[str, object],
          csv_header: List[str], csv_rows: List[List[object]]) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    if args.format == "json":
        doc = {"version": __version__, "config": config}
        doc.update(payload)
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(csv_header)
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_symbols(args) -> int:
    spec = parse_pseudogroup(args.group)
    lo, hi = _parse_range(args.l)
    dims = {l: symbol_dim(spec, l, args.allow_r1_point_lift)
            for l in range(lo, hi + 1)}
    payload = {"group": str(spec),
               "table": {str(l): d for l, d in dims.items()}}
    rows = [[l, dims[l]] for l in range(lo, hi + 1)]
    _emit(args, payload, ["l", "dim"], rows)
    return 0


def _require_flag(args, spec) -> FlagContext:
    if not args.flag:
        raise ParamOutOfRange("this table needs --flag")
    return _parse_flag(args.flag, spec)


def cmd_cohomology(args) -> int:
    spec = parse_pseudogroup(args.group)
    lo, hi = _parse_range(args.l)
    if lo < 1:
        raise ParamOutOfRange("symbol degrees start at 1")
    gsys = system(spec, hi + 1, args.cap)
    s_lo, s_hi = _parse_range(args.s) if args.s else (0, gsys.base_dim)
    table = args.table
    if table == "spencer":
        s_hi = min(s_hi, gsys.base_dim)
        tab = spencer_table(gsys, range(lo, hi + 1), range(s_lo, s_hi + 1))
    else:
        ctx = _require_flag(args, spec)
        s_hi = min(s_hi, ctx.n)
        cells: Dict[Tuple[int, int], int] = {}
        if table == "obstruction":
            hsys = _load_h_system(args.h_file, ctx) if args.h_file else None
            for l in range(lo, hi + 1):
                h_l = hsys.grade(l) if hsys else None
                cells[(l, 0)] = covariants(ctx, gsys.grade(l), h_l).dim_O
            tab = CohomologyTable("obstruction-dims", cells)
        else:
            if table == "covariant":
                hsys = _load_h_system(args.h_file, ctx) if args.h_file \
                    else None

                def fn(a, s):
                    return covariant_cohomology(ctx, gsys, hsys, a + s, s)
            elif table == "restricted":
                def fn(a, s):
                    return restricted_spencer_H(ctx, gsys, a + s, s)
            else:
                def fn(a, s):
                    return stationary_row_cohomology(ctx, gsys, a + s, s)
            for a in range(lo, hi + 1):
                for s in range(s_lo, s_hi + 1):
                    cells[(a, s)] = fn(a, s)
            tab = CohomologyTable(table, cells)
    payload = {"group": str(spec), "table": tab.to_jsonable()}
    rows = [[i, j, v] for (i, j), v in sorted(tab.cells.items())]
    _emit(args, payload, ["sym_degree", "form_degree", "dim"], rows)
    return 0


REPORT_FIELDS = ["l", "dim_g", "dim_h", "dim_stationary", "dim_lambda_image",
                 "dim_O", "transversal", "dim_necessary_ok", "caveat"]


def cmd_covariants(args) -> int:
    spec = parse_pseudogroup(args.group)
    ctx = _require_flag(args, spec)
    lo, hi = _parse_range(args.l)
    gsys = system(spec, hi, args.cap)
    hsys = _load_h_system(args.h_file, ctx) if args.h_file else None
    reports = []
    for l in range(lo, hi + 1):
        h_l = hsys.grade(l) if hsys else None
        reports.append(covariants(ctx, gsys.grade(l), h_l).to_jsonable())
    payload = {"group": str(spec), "reports": reports}
    rows = [[rep.get(f, "") for f in REPORT_FIELDS] for rep in reports]
    _emit(args, payload, REPORT_FIELDS, rows)
    return 0


def cmd_transversality(args) -> int:
    spec = parse_pseudogroup(args.group)
    ctx = _require_flag(args, spec)
    lo, hi = _parse_range(args.l)
    if lo != 1:
        raise ParamOutOfRange("the scan always starts at degree 1")
    gsys = system(spec, hi, args.cap)
    hsys = _load_h_system(args.h_file, ctx) if args.h_file else None
    entries = [e.to_jsonable() for e in
               transversality_scan(ctx, gsys, hsys, hi)]
    payload = {"group": str(spec), "entries": entries}
    header = REPORT_FIELDS + ["stationary_tau_H2_zero", "restricted_H1_zero"]
    rows = [[e.get(f, "") for f in header] for e in entries]
    _emit(args, payload, header, rows)
    return 0


def cmd_oracle(args) -> int:
    spec = parse_pseudogroup(args.group)
    lo, hi = _parse_range(args.l)
    rows = []
    if spec.kind == "point_lie":
        n, r, k = (spec.param(p) for p in ("n", "r", "k"))
        for l in range(lo, hi + 1):
            formula = point_lie_total(n, r, k, l, args.allow_r1_point_lift)
            brute = symbol_oracle("point", n, r, k, l, cap=args.cap)
            rows.append({"l": l, "formula": formula, "oracle": brute,
                         "match": formula == brute})
    elif spec.kind == "contact_lie":
        n, k = spec.param("n"), spec.param("k")
        for l in range(lo, hi + 1):
            formula = contact_lie_dim(n, k, l)
            brute = symbol_oracle("contact", n, 1, k, l, cap=args.cap)
            rows.append({"l": l, "formula": formula, "oracle": brute,
                         "match": formula == brute})
    elif spec.kind == "volume":
        m = spec.param("m")
        for l in range(lo, hi + 1):
            ref = volume_claimed_dim(m, l)
            computed = symbol_dim(spec, l)
            rows.append({"l": l, "formula": ref, "oracle": computed,
                         "match": ref == computed})
    else:
        raise ParamOutOfRange(
            "oracle compares point_lie, contact_lie or volume groups")
    payload = {"group": str(spec), "rows": rows}
    table = [[r["l"], r["formula"], r["oracle"], r["match"]] for r in rows]
    _emit(args, payload, ["l", "formula", "oracle", "match"], table)
    return 0


def _var_name(v) -> str:
    if v[0] == "x":
        return "x%d" % (v[1] + 1)
    if not any(v[2]):
        return "u%d" % (v[1] + 1)
    return "p[%d,(%s)]" % (v[1] + 1, ",".join(str(s) for s in v[2]))


def cmd_tresse(args) -> int:
    if not args.poly_file:
        raise ParamOutOfRange("tresse needs --poly-file")
    with open(args.poly_file) as fh:
        doc = json.load(fh)
    n, r = int(doc["n"]), int(doc["r"])
    frame_src = list(doc["frame"])
    target_src = list(doc.get("targets", []))
    frame_polys = [parse_jet_polynomial(s, n, r) for s in frame_src]
    targets = [parse_jet_polynomial(s, n, r) for s in target_src]
    order = max(f.k_max for f in frame_polys + targets) + 1 \
        if frame_polys + targets else 1
    if args.point_file:
        with open(args.point_file) as fh:
            pdoc = json.load(fh)
        values = {parse_variable(k, n, r): Fraction(str(v))
                  for k, v in pdoc["values"].items()}
        point = JetPoint(n, r, order, values)
    else:
        point = JetPoint.random(n, r, order, RationalLCG(args.seed))
    frame = TresseFrame(frame_polys, point)
    identity = [[str(c) for c in tresse(f, frame)] for f in frame_polys]
    evaluated = {target_src[i]: [str(c) for c in tresse(t, frame)]
                 for i, t in enumerate(targets)}
    payload = {
        "point": {_var_name(v): str(val)
                  for v, val in sorted(point.assignments.items())},
        "jacobian": [[str(c) for c in row] for row in frame.jacobian],
        "frame_identity": identity,
        "values": evaluated,
    }
    rows = []
    for i, src in enumerate(frame_src):
        for comp, val in enumerate(identity[i]):
            rows.append(["frame:" + src, comp + 1, val])
    for src in target_src:
        for comp, val in enumerate(evaluated[src]):
            rows.append([src, comp + 1, val])
    _emit(args, payload, ["function", "component", "value"], rows)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spencer",
        description="Exact symbol, cohomology and jet-calculus tables "
                    "for transitive pseudogroups.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, flag=False, hfile=False, group=True):
        p.add_argument("--group", required=group, default=None,
                       help="pseudogroup spec, e.g. symplectic:2n=4")
        p.add_argument("--l", default="1..3",
                       help="degree or range, e.g. 2 or 1..5")
        p.add_argument("--s", default=None,
                       help="form-degree range for tables")
        if flag:
            p.add_argument("--flag", default=None,
                           help="stratum=<name> or tau=<rows ';'-separated, "
                                "entries ','-separated>")
        if hfile:
            p.add_argument("--h-file", dest="h_file", default=None,
                           help="JSON equation file")
        p.add_argument("--cap", type=int, default=None,
                       help="materialization cap override")
        p.add_argument("--allow-r1-point-lift", action="store_true",
                       dest="allow_r1_point_lift")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("symbols", help="symbol dimension table")
    common(p)
    p.set_defaults(func=cmd_symbols)

    p = sub.add_parser("cohomology", help="cohomology tables")
    common(p, flag=True, hfile=True)
    p.add_argument("--table", default="spencer",
                   choices=("spencer", "restricted", "stationary",
                            "obstruction", "covariant"))
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("covariants", help="covariant reports per degree")
    common(p, flag=True, hfile=True)
    p.set_defaults(func=cmd_covariants)

    p = sub.add_parser("transversality", help="covariant scan with flags")
    common(p, flag=True, hfile=True)
    p.set_defaults(func=cmd_transversality)

    p = sub.add_parser("oracle", help="formula vs brute-force dims")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("tresse", help="invariant derivative evaluation")
    common(p, group=False)
    p.add_argument("--poly-file", dest="poly_file", default=None,
                   help="JSON with n, r, frame[], targets[]")
    p.add_argument("--point-file", dest="point_file", default=None,
                   help="JSON with values{var: rational}")
    p.set_defaults(func=cmd_tresse)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CAP_ERRORS as exc:
        print("cap exceeded: %s" % exc, file=sys.stderr)
        return 4
    except PRECONDITION_ERRORS as exc:
        print("precondition failed: %s" % exc, file=sys.stderr)
        return 3
    except USAGE_ERRORS as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print("bad input file: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
