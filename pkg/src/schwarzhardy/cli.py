"""Command-line front end.

Subcommands write CSV or JSON to ``--out`` (default: standard output).
Exit status: 0 on success, 1 when a verification check fails, 2 on usage
or execution errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .analysis import (
    DEFAULT_EPS,
    distance_ratio,
    full_verification,
    kappa_lower_bound,
    ratio_infimum,
    sharpness_table,
)
from .distances import critical_delta, induced_distance, riemannian_distance
from .functionals import heisenberg_minimiser, heisenberg_report
from .geometry import DomainError, check_dimension

__all__ = ["FigureRequest", "figure_rows", "main", "render_csv", "render_svg"]

_CURVES = {
    "d": riemannian_distance,
    "delta": critical_delta,
    "s": induced_distance,
    "ratio": distance_ratio,
}
_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class FigureRequest:
    which: str
    dims: tuple[int, ...]
    r_min: float
    r_max: float
    samples: int = 400
    output_format: str = "csv"

    def __post_init__(self):
        if self.which not in _CURVES:
            raise UsageError(f"unknown curve {self.which!r}")
        if not self.dims:
            raise UsageError("at least one dimension is required")
        for n in self.dims:
            check_dimension(n)
        if not 1.0 < self.r_min < self.r_max or not math.isfinite(self.r_max):
            raise UsageError("need 1 < rmin < rmax < inf")
        if self.samples < 2:
            raise UsageError("need at least two samples")
        if self.output_format not in ("csv", "svg"):
            raise UsageError(f"unknown format {self.output_format!r}")


def figure_rows(req: FigureRequest):
    """``(r, n, value)`` triples sorted by ``(n, r)``."""
    r = np.linspace(req.r_min, req.r_max, req.samples)
    rows = []
    for n in sorted(set(req.dims)):
        values = np.asarray(_CURVES[req.which](n, r))
        rows.extend((float(x), n, float(v)) for x, v in zip(r, values))
    return rows


def render_csv(rows) -> str:
    buf = io.StringIO()
    buf.write("r,n,value\n")
    for r, n, v in rows:
        buf.write(f"{r:.17g},{n},{v:.17g}\n")
    return buf.getvalue()


def render_svg(rows, which: str, width=640, height=420, pad=48) -> str:
    rs = [r for r, _, _ in rows]
    vs = [v for _, _, v in rows]
    x0, x1 = min(rs), max(rs)
    y0, y1 = min(0.0, min(vs)), max(vs)
    if y1 == y0:
        y1 = y0 + 1.0
    sx = lambda r: pad + (r - x0) / (x1 - x0) * (width - 2 * pad)
    sy = lambda v: height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle">r</text>',
        f'<text x="14" y="{height / 2:.1f}">{which}</text>',
        f'<text x="{pad}" y="{height - pad + 16}" text-anchor="middle">{x0:.4g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" text-anchor="middle">{x1:.4g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" text-anchor="end">{y1:.4g}</text>',
    ]
    dims = sorted({n for _, n, _ in rows})
    for i, n in enumerate(dims):
        points = " ".join(f"{sx(r):.2f},{sy(v):.2f}" for r, m, v in rows if m == n)
        colour = _COLOURS[i % len(_COLOURS)]
        out.append(f'<polyline fill="none" stroke="{colour}" points="{points}"/>')
        out.append(f'<text x="{width - pad - 40}" y="{pad + 16 * (i + 1)}" fill="{colour}">n={n}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- argument types -----------------------------------------------------------

def _dimension(text):
    try:
        return check_dimension(int(text))
    except (ValueError, DomainError) as exc:
        raise argparse.ArgumentTypeError(f"invalid dimension {text!r}: {exc}") from None


def _dimensions(text):
    return tuple(_dimension(part) for part in text.split(",") if part.strip())


def _floats(text):
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schwarzhardy",
        description="Hardy and uncertainty inequalities outside a Schwarzschild horizon.")
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="tabulate d, delta, s or d/delta against r")
    fig.add_argument("--which", choices=sorted(_CURVES), required=True)
    fig.add_argument("--dims", type=_dimensions, default=(3, 4, 5))
    fig.add_argument("--rmin", type=float, default=1.001)
    fig.add_argument("--rmax", type=float, default=5.0)
    fig.add_argument("--samples", type=int, default=400)
    fig.add_argument("--format", choices=("csv", "svg"), default="csv")
    fig.add_argument("--out")

    ver = sub.add_parser("verify", help="run the verification battery")
    ver.add_argument("--n", type=_dimension, required=True)
    ver.add_argument("--out")

    sharp = sub.add_parser("sharpness", help="quotients of the Hardy minimising sequence")
    sharp.add_argument("--n", type=_dimension, required=True)
    sharp.add_argument("--eps", type=_floats, default=DEFAULT_EPS)
    sharp.add_argument("--out")

    kappa = sub.add_parser("kappa", help="lower bound for the d-weighted Hardy constant")
    kappa.add_argument("--n", type=_dimension, required=True)
    kappa.add_argument("--out")

    heis = sub.add_parser("heisenberg", help="uncertainty inequality for the extremal family")
    heis.add_argument("--n", type=_dimension, required=True)
    heis.add_argument("--B", type=float, default=1.0)
    heis.add_argument("--out")
    return parser


# -- commands -------------------------------------------------------------------

def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json(payload):
    return json.dumps(payload, indent=2) + "\n"


def cmd_figure(args) -> int:
    req = FigureRequest(args.which, args.dims, args.rmin, args.rmax, args.samples, args.format)
    rows = figure_rows(req)
    text = render_csv(rows) if req.output_format == "csv" else render_svg(rows, req.which)
    _emit(text, args.out)
    return 0


def cmd_verify(args) -> int:
    report = full_verification(args.n)
    _emit(_json(report.to_dict()), args.out)
    for check in report.failures:
        print(f"FAIL {check.name}: computed {check.computed!r}, reference {check.reference!r}",
              file=sys.stderr)
    return 0 if report.all_passed else 1


def cmd_sharpness(args) -> int:
    if not args.eps or any(not e > 0.5 for e in args.eps):
        raise UsageError("every epsilon must exceed 1/2")
    rows = sharpness_table(args.n, args.eps).data["sharpness"]
    buf = io.StringIO()
    fields = ["epsilon", "quotient_quadrature", "quotient_closed_form", "D_eps"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([f"{row[k]:.17g}" for k in fields])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_kappa(args) -> int:
    result = ratio_infimum(args.n)
    finite = lambda x: x if math.isfinite(x) else None
    payload = {
        "n": args.n,
        "argmin": finite(result.argmin_r),
        "min_ratio": result.min_ratio,
        "bound": kappa_lower_bound(args.n),
        "grid_size": result.grid_size,
        "refined": result.refined,
        "bracket": [finite(x) for x in result.bracket],
        "argmin_at_branch_radius": result.at_branch_radius,
    }
    _emit(_json(payload), args.out)
    return 0


def cmd_heisenberg(args) -> int:
    if not args.B > 0:
        raise UsageError("B must be positive")
    rep = heisenberg_report(args.n, heisenberg_minimiser(args.n, args.B))
    payload = {"n": args.n, "B": args.B, "lhs": rep.lhs, "rhs": rep.rhs, "slack": rep.slack,
               "relative_slack": rep.relative_slack, "moment": rep.moment, "energy": rep.energy}
    _emit(_json(payload), args.out)
    return 0


_COMMANDS = {
    "figure": cmd_figure,
    "verify": cmd_verify,
    "sharpness": cmd_sharpness,
    "kappa": cmd_kappa,
    "heisenberg": cmd_heisenberg,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any failure is an execution error
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
