"""Command-line entry point: ``lozicert <verb> [options]``.

Exit status: 0 certified success, 2 certified refutation, 3 indeterminate,
1 usage error.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from fractions import Fraction
from pathlib import Path as FilePath
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .covering import CoverStatus, MarkedQuadrilateral, certify, entropy_lower_bound, reference_boxes
from .epspoly import IndeterminateSign
from .figures import FigureError, emit_figure
from .fixed_points import enumerate_fixed_points, f2_point
from .geometry import ConvexPolygon, format_rational, parse_rational
from .lozi import LoziParams, domain_number
from .perturbation import VERTEX_NAMES, coefficient_drift, jump_params
from .simulation import (
    VIEWPORT,
    critical_line,
    estimate_entropy,
    first_crossing,
    lc_image,
    lc_segment,
    trace_unstable,
    z_point,
)
from .trapping import FragmentBudgetExceeded, segment_family_params, trapping_region_for, verify_trapping

EXIT_OK, EXIT_USAGE, EXIT_REFUTED, EXIT_INDETERMINATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(token: str) -> Fraction:
    try:
        return parse_rational(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unparseable rational {token!r}") from None


def _floats(count: int):
    def conv(token: str):
        parts = token.split(",")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {token!r}") from None
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {token!r}")
        return vals
    return conv


def _params(args) -> LoziParams:
    return LoziParams(args.a, args.b)


def _params_json(p: LoziParams) -> dict:
    return {"a": format_rational(p.a), "b": format_rational(p.b)}


def _read_json(path: str):
    try:
        return json.loads(FilePath(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


# --- verbs -----------------------------------------------------------------

def cmd_fixed_points(args):
    p = _params(args)
    fs = enumerate_fixed_points(p, args.period)
    doc = fs.to_json()
    if args.period == 4:
        for entry in doc["points"] + doc["segments"] + doc["rejected"]:
            its = entry.get("itineraries") or [entry["itinerary"]]
            entry["domains"] = sorted(domain_number(i) for i in its)
    summary = (f"{len(fs.points)} isolated fixed points and {len(fs.segments)} segments of "
               f"L^{args.period}; {len(fs.rejected)} candidates rejected")
    return EXIT_OK, summary, doc


def _load_boxes(args):
    if args.config:
        cfg = _read_json(args.config)
        try:
            p = LoziParams(parse_rational(cfg["params"]["a"]), parse_rational(cfg["params"]["b"]))
            n = int(cfg.get("iterate", 4))
            boxes = [MarkedQuadrilateral.from_json(b) for b in cfg["boxes"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad box-set file: {exc}") from None
        asserted = cfg.get("asserted", [])
    else:
        p = jump_params(args.eps1, args.eps2)
        h = f2_point(segment_family_params(args.eps2)).y
        boxes, n, asserted = list(reference_boxes(args.eps1, h)), args.iterate or 4, []
    names = [b.name for b in boxes]
    pairs = []
    for item in list(asserted) + [s.split(",") for s in args.assert_cover or []]:
        try:
            i, j = (names.index(x) if isinstance(x, str) and not x.isdigit() else int(x) for x in item)
        except ValueError:
            raise UsageError(f"unknown box in assertion {item!r}") from None
        pairs.append((i, j))
    return p, n, boxes, pairs


def _assertion_status(report, pairs) -> int:
    statuses = [report.verdicts[i][j].status for i, j in pairs]
    if CoverStatus.NOT_COVERED in statuses:
        return EXIT_REFUTED
    if CoverStatus.INDETERMINATE in statuses:
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_covering(args):
    p, n, boxes, pairs = _load_boxes(args)
    report = certify(p, n, boxes)
    doc = report.to_json()
    doc["asserted"] = [[boxes[i].name or i, boxes[j].name or j] for i, j in pairs]
    code = _assertion_status(report, pairs)
    summary = f"matrix {report.matrix.tolist()}, entropy lower bound {report.entropy.bound:.6f}"
    if pairs:
        summary += {EXIT_OK: "; all asserted coverings certified",
                    EXIT_REFUTED: "; an asserted covering is refuted",
                    EXIT_INDETERMINATE: "; an asserted covering is indeterminate"}[code]
    return code, summary, doc


def cmd_entropy_bound(args):
    try:
        m = json.loads(args.matrix)
        arr = np.asarray(m, dtype=np.int64)
    except (json.JSONDecodeError, ValueError, TypeError):
        raise UsageError(f"unparseable matrix {args.matrix!r}") from None
    try:
        eb = entropy_lower_bound(arr, args.iterate or 1)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = {"matrix": arr.tolist(), **eb.to_json()}
    return EXIT_OK, f"lambda_1 >= {eb.spectral_radius:.9f}, bound {eb.bound:.9f}", doc


def _region(args, p) -> ConvexPolygon:
    if args.region:
        data = _read_json(args.region)
        data = data.get("vertices", data) if isinstance(data, dict) else data
        try:
            return ConvexPolygon.from_points([(parse_rational(x), parse_rational(y)) for x, y in data])
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad region file: {exc}") from None
    try:
        return trapping_region_for(p)
    except ValueError as exc:
        raise UsageError(f"no default region: {exc}; pass --region") from None


def cmd_trapping(args):
    p = _params(args)
    region = _region(args, p)
    n = args.iterate or 4
    try:
        cert = verify_trapping(p, n, region, args.steps)
    except FragmentBudgetExceeded as exc:
        return EXIT_INDETERMINATE, str(exc), {"params": _params_json(p), "error": str(exc)}
    doc = cert.to_json()
    if cert.passed:
        return EXIT_OK, f"L^{n} maps the region into itself for {args.steps} steps", doc
    step, it, _ = cert.offending
    return EXIT_REFUTED, f"step {step}: piece {it} leaves the region", doc


def cmd_perturb(args):
    try:
        table = coefficient_drift(args.eps2)
    except IndeterminateSign as exc:
        return EXIT_INDETERMINATE, str(exc), {"eps2": format_rational(args.eps2), "error": str(exc)}
    doc = table.to_json()
    for row, pair in zip(doc["rows"], table.rows):
        row["display"] = [format_rational(v) for v in pair.truncated()]
    if args.vertex:
        doc["rows"] = [r for r in doc["rows"] if r["vertex"] in args.vertex]
    lines = [f"{r.vertex}: ({r.x_lin}, {r.y_lin})" for r in table.rows
             if not args.vertex or r.vertex in args.vertex]
    return EXIT_OK, "; ".join(lines), doc


def cmd_jump_demo(args):
    base = segment_family_params(args.eps2)
    fs = enumerate_fixed_points(base, 4)
    try:
        cert = verify_trapping(base, 4, trapping_region_for(base), 2)
        trap_ok = cert.passed
        trap_doc = cert.to_json()
    except (ValueError, FragmentBudgetExceeded) as exc:
        trap_ok, trap_doc = None, {"error": str(exc)}
    p = jump_params(args.eps1, args.eps2)
    report = certify(p, 4, reference_boxes(args.eps1, f2_point(base).y))
    expected = [[1, 1], [1, 0]]
    got = report.matrix.tolist()
    statuses = [report.verdicts[i][j].status for i in range(2) for j in range(2) if expected[i][j]]
    doc = {
        "segment_params": _params_json(base),
        "jump_params": _params_json(p),
        "fixed_points": fs.to_json(),
        "trapping": trap_doc,
        "covering": report.to_json(),
    }
    summary = (f"{len(fs.segments)} fixed segments on the segment family, trapping "
               f"{'pass' if trap_ok else 'fail'}, matrix {got}, bound {report.entropy.bound:.6f}")
    if CoverStatus.INDETERMINATE in statuses or trap_ok is None:
        return EXIT_INDETERMINATE, summary, doc
    if got != expected or not trap_ok or len(fs.segments) != 2:
        return EXIT_REFUTED, summary, doc
    return EXIT_OK, summary, doc


def cmd_trace(args):
    p = _params(args)
    sides = ["left", "right"] if args.side == "both" else [args.side]
    try:
        polys = [trace_unstable(p, s, args.arclength, args.refine_tol) for s in sides]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = {"params": _params_json(p), "tag": "numerical evidence",
           "polylines": [pl.to_json() for pl in polys]}
    if "right" in sides:
        cross = first_crossing(polys[sides.index("right")])
        doc["z_closed_form_evidence"] = z_point(p).tolist()
        doc["z_crossing_evidence"] = None if cross is None else cross.tolist()
    if args.csv:
        FilePath(args.csv).write_text("".join(pl.to_csv() for pl in polys))
    escaped = any(pl.escaped for pl in polys)
    return EXIT_OK, f"traced {', '.join(sides)} ({'escaped' if escaped else 'bounded'})", doc


def cmd_critical_lines(args):
    p = _params(args)
    if not 1 <= args.depth <= 8:
        raise UsageError("depth must be between 1 and 8")
    vp = tuple(args.viewport)
    lines = critical_line(p, args.depth, vp)
    extra = [lc_segment(p, vp), lc_image(p, vp)] if p.a != 0 and p.b != 0 else []
    doc = {"params": _params_json(p), "tag": "numerical evidence", "viewport": list(vp),
           "polylines": [pl.to_json() for pl in lines + extra]}
    if args.csv:
        FilePath(args.csv).write_text("".join(pl.to_csv() for pl in lines + extra))
    return EXIT_OK, f"{len(lines)} pulled-back singularity lines", doc


def cmd_estimate_entropy(args):
    p = _params(args)
    region = None
    box = tuple(args.box)
    if args.in_region:
        r = trapping_region_for(p).as_floats()
        region = r
        xs, ys = [v[0] for v in r], [v[1] for v in r]
        box = (min(xs), max(xs), min(ys), max(ys))
    try:
        est = estimate_entropy(p, args.n, args.sep, box, tuple(int(g) for g in args.grid), region,
                               increment=True)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = {"params": _params_json(p), "label": "non-rigorous", **est.to_json()}
    return EXIT_OK, f"non-rigorous entropy estimate {est.value:.4f} ({est.count} separated orbits)", doc


def cmd_figure(args):
    if not args.svg:
        raise UsageError("figure needs --svg")
    return EXIT_OK, "figure written", _read_json(args.report)


# --- plumbing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--a", type=_rational, default=Fraction(7, 5))
    common.add_argument("--b", type=_rational, default=Fraction(2, 5))
    common.add_argument("--eps1", type=_rational, default=Fraction(1, 1000))
    common.add_argument("--eps2", type=_rational, default=Fraction(0))
    common.add_argument("--period", "--iterate", dest="iterate", type=int, default=None)
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--svg", help="also write a drawing of the report")
    common.add_argument("--layers", help="comma-separated layer names for --svg")
    common.add_argument("--canonical", action="store_true", help="omit timing and environment metadata")

    parser = _Parser(prog="lozicert", description="Exact certificates for the Lozi family.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("fixed-points", parents=[common])
    s.set_defaults(func=cmd_fixed_points)
    s = sub.add_parser("covering", parents=[common])
    s.add_argument("--config")
    s.add_argument("--assert-cover", action="append", metavar="I,J")
    s.set_defaults(func=cmd_covering)
    s = sub.add_parser("entropy-bound", parents=[common])
    s.add_argument("--matrix", default="[[1,1],[1,0]]")
    s.set_defaults(func=cmd_entropy_bound)
    s = sub.add_parser("trapping", parents=[common])
    s.add_argument("--steps", type=int, default=2)
    s.add_argument("--region")
    s.set_defaults(func=cmd_trapping)
    s = sub.add_parser("perturb", parents=[common])
    s.add_argument("--vertex", action="append", choices=VERTEX_NAMES)
    s.set_defaults(func=cmd_perturb)
    s = sub.add_parser("jump-demo", parents=[common])
    s.set_defaults(func=cmd_jump_demo)
    s = sub.add_parser("trace", parents=[common])
    s.add_argument("--side", choices=["left", "right", "both"], default="both")
    s.add_argument("--arclength", type=float, default=20.0)
    s.add_argument("--refine-tol", type=float, default=1e-2)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_trace)
    s = sub.add_parser("critical-lines", parents=[common])
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--viewport", type=_floats(4), default=list(VIEWPORT), metavar="X0,X1,Y0,Y1")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_critical_lines)
    s = sub.add_parser("estimate-entropy", parents=[common])
    s.add_argument("--n", type=int, default=14)
    s.add_argument("--sep", type=float, default=0.5, help="separation eps")
    s.add_argument("--box", type=_floats(4), default=list(VIEWPORT), metavar="X0,X1,Y0,Y1")
    s.add_argument("--grid", type=_floats(2), default=[400, 400], metavar="NX,NY")
    s.add_argument("--in-region", action="store_true", help="sample only inside the trapping hexagon")
    s.set_defaults(func=cmd_estimate_entropy)
    s = sub.add_parser("figure", parents=[common])
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_figure)
    return parser


def _dispatch(args):
    if args.verb == "fixed-points":
        args.period = args.iterate or 4
    return args.func(args)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        started = time.perf_counter()
        code, summary, result = _dispatch(args)
        if args.verb == "figure":
            doc = result
        else:
            doc = {"verb": args.verb, "exit_status": code, "summary": summary, "result": result}
            if not args.canonical:
                doc["meta"] = {"version": __version__, "python": platform.python_version(),
                               "seconds": round(time.perf_counter() - started, 6)}
        if args.svg:
            names = args.layers.split(",") if args.layers else None
            FilePath(args.svg).write_text(emit_figure(doc, names))
        if args.verb != "figure":
            text = json.dumps(doc, indent=2) + "\n"
            if args.out:
                FilePath(args.out).write_text(text)
                print(summary, file=stdout)
            else:
                stdout.write(text)
        return code
    except (UsageError, FigureError) as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
