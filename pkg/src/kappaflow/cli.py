"""Command-line reports: classification, winding profiles, curves, certificates."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import _serialize
from . import classification
from . import curves
from . import flow
from . import normal_flow
from . import positivity
from . import winding
from .models import CurvatureModel, eval_f, parse_model_spec


@dataclass(frozen=True)
class RunConfig:
    """Shared numeric knobs; flags only, nothing comes from the environment."""

    quad_tol: float = 1e-8
    ode_tol: float = 1e-10
    root_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        for name in ("quad_tol", "ode_tol", "root_tol"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")


class _Parser(argparse.ArgumentParser):
    # usage problems are domain errors, not certification failures
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


# ---------------------------------------------------------------------------
# subcommands


def _cmd_classify(args, config: RunConfig) -> int:
    model = parse_model_spec(args.model)
    if model.kind == "monomial":
        rep = classification.classify_monomial(model.a, model.delta)
    else:
        rep = classification.classify(model)
    report = {
        "model": args.model,
        "taxonomy_case": rep.taxonomy_case,
        "circles": [{"radius": r, "orientation": o}
                    for r, o in rep.circle_solutions],
        "noncircular": [{"s": rec.s, "n": rec.n, "residual": rec.residual}
                        for rec in rep.jordan_set_Of],
        "predicted_count": rep.predicted_count,
    }
    _write(args.json, _serialize.json_text(report))
    if args.png:
        _classify_png(model, rep, args.png)
    print(f"classify: {args.model}: {len(rep.circle_solutions)} circle(s), "
          f"{len(rep.jordan_set_Of)} noncircular record(s) -> {args.json}")
    return 0


def _classify_png(model: CurvatureModel, rep, path: str) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        prof = winding.winding_profile(model, n=80)
        ax.plot(prof.grid, prof.omega, color="tab:blue", label="omega")
        lo, hi = float(np.min(prof.omega)), float(np.max(prof.omega))
        for n in range(2, 10):
            if lo - 0.05 <= 1.0 / n <= hi + 0.05:
                ax.axhline(1.0 / n, color="0.8", lw=0.8, zorder=0)
        for rec in rep.jordan_set_Of:
            ax.plot([rec.s], [1.0 / rec.n], "o", color="tab:red")
        ax.set_xlabel("s")
        ax.set_ylabel("net winding")
    except ValueError:
        s_hi = 2.0 * (model.s_f or 1.0)
        grid = np.linspace(0.05 * s_hi, s_hi, 200)
        ax.plot(grid, eval_f(model, grid), color="tab:blue")
        ax.set_xlabel("s")
        ax.set_ylabel("curvature law")
    ax.set_title(model.spec)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _cmd_winding(args, config: RunConfig) -> int:
    model = parse_model_spec(args.model)
    methods = {"quad": ("quadrature",), "ode": ("ode_oracle",),
               "both": ("quadrature", "ode_oracle")}[args.method]
    rows = []
    profiles = []
    for meth in methods:
        tol = config.quad_tol if meth == "quadrature" else config.ode_tol
        prof = winding.winding_profile(model, n=args.grid, method=meth,
                                       tol=tol)
        profiles.append(prof)
        for s, om, er in zip(prof.grid, prof.omega, prof.est_error):
            rows.append((float(s), float(om), prof.method, float(er)))
    _write(args.out, _serialize.csv_text(("s", "omega", "method", "est_error"),
                                         rows))
    if args.png:
        plt = _plt()
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for prof in profiles:
            ax.plot(prof.grid, prof.omega, label=prof.method)
        ax.set_xlabel("s")
        ax.set_ylabel("net winding")
        ax.set_title(model.spec)
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.png)
        plt.close(fig)
    print(f"winding: {args.model}: {len(rows)} row(s) -> {args.out}")
    return 0


def _parse_point(text: str) -> complex:
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ValueError(f"point must be RE or RE,IM, got {text!r}")
    try:
        re = float(parts[0])
        im = float(parts[1]) if len(parts) == 2 else 0.0
    except ValueError:
        raise ValueError(f"cannot parse point {text!r}") from None
    return complex(re, im)


@dataclass(frozen=True)
class _Path2D:
    points: np.ndarray
    closed: bool


def _cmd_portrait(args, config: RunConfig) -> int:
    model = parse_model_spec(args.model)
    starts = [_parse_point(t) for t in args.z0]
    traces = [flow.integrate_orbit(model, z0, duration=args.duration,
                                   tol=config.ode_tol, num=args.num)
              for z0 in starts]
    if args.csv:
        if len(traces) == 1:
            tr = traces[0]
            rows = [(float(t), float(z.real), float(z.imag))
                    for t, z in zip(tr.times, tr.samples)]
            text = _serialize.csv_text(("t", "re", "im"), rows)
        else:
            rows = []
            for k, tr in enumerate(traces):
                rows.extend((k, float(t), float(z.real), float(z.imag))
                            for t, z in zip(tr.times, tr.samples))
            text = _serialize.csv_text(("curve", "t", "re", "im"), rows)
        _write(args.csv, text)
    if args.svg:
        paths = [_Path2D(points=tr.samples, closed=tr.period is not None)
                 for tr in traces]
        _write(args.svg, curves._svg_text(paths))
    if args.png:
        plt = _plt()
        fig, ax = plt.subplots(figsize=(5.0, 5.0))
        for tr in traces:
            ax.plot(tr.samples.real, tr.samples.imag, lw=1.0)
        ax.set_aspect("equal")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        ax.set_title(model.spec)
        fig.tight_layout()
        fig.savefig(args.png)
        plt.close(fig)
    print(f"portrait: {args.model}: {len(traces)} orbit(s)")
    return 0


def _cmd_curve(args, config: RunConfig) -> int:
    model = parse_model_spec(args.model)
    trace = curves.reconstruct(model, args.s, theta0=args.theta0,
                               n_halfperiods=args.n, num=args.num,
                               tol=config.ode_tol)
    curves.export(trace, "svg", args.svg)
    if args.csv:
        curves.export(trace, "csv", args.csv)
    if args.png:
        plt = _plt()
        fig, ax = plt.subplots(figsize=(5.0, 5.0))
        ax.plot(trace.points.real, trace.points.imag, lw=1.2)
        ax.plot([0.0], [0.0], "+", color="0.5")
        ax.set_aspect("equal")
        ax.set_title(f"{model.spec}, s={args.s:g}")
        fig.tight_layout()
        fig.savefig(args.png)
        plt.close(fig)
    status = "closed" if trace.closed else "open"
    print(f"curve: {args.model} s={args.s:g}: {status}, "
          f"winding {trace.winding_n}, "
          f"curvature residual {trace.max_curvature_residual:.3e} "
          f"-> {args.svg}")
    return 0


def _cmd_verify(args, config: RunConfig) -> int:
    cert = positivity.certificate(args.suite)
    text = _serialize.json_text(cert)
    if args.json:
        _write(args.json, text)
    else:
        sys.stdout.write(text)
    failed = [c["name"] for c in cert["checks"] if not c["passed"]]
    if failed:
        print(f"verify: suite {args.suite}: FAILED "
              f"({', '.join(failed)})", file=sys.stderr)
        return 2
    n = len(cert["checks"])
    print(f"verify: suite {args.suite}: {n} check(s) passed", file=sys.stderr)
    return 0


def _cmd_supplement(args, config: RunConfig) -> int:
    model = normal_flow.normal_model(args.delta)
    grid, vals = normal_flow.nu_profile(model, n=args.nu_grid,
                                        tol=config.quad_tol)
    at_sg, second_sg = normal_flow.nu_limit_at_sg(model)
    report = {
        "delta": args.delta,
        "nu": [{"s": float(s), "nu": float(v)} for s, v in zip(grid, vals)],
        "limits": {
            "at_zero": normal_flow.nu_limit_at_zero(model),
            "at_sg": at_sg,
            "second_at_sg": second_sg,
        },
    }
    if args.classify:
        rep = normal_flow.classify_supplement(args.delta)
        report["classification"] = {
            "records": [{"s": r.s, "n": r.n, "residual": r.residual}
                        for r in rep.records],
            "predicted_count": rep.predicted_count,
            "isochronous": rep.isochronous,
            "notes": list(rep.notes),
        }
    _write(args.json, _serialize.json_text(report))
    if args.png:
        plt = _plt()
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot(grid, vals, color="tab:blue", label="nu")
        lo, hi = float(np.min(vals)), float(np.max(vals))
        for n in range(2, 10):
            if lo - 0.05 <= 1.0 / n <= hi + 0.05:
                ax.axhline(1.0 / n, color="0.8", lw=0.8, zorder=0)
        ax.set_xlabel("s")
        ax.set_ylabel("nu")
        ax.set_title(f"normal law, delta={args.delta:g}")
        fig.tight_layout()
        fig.savefig(args.png)
        plt.close(fig)
    print(f"supplement: delta={args.delta:g}: {len(grid)} grid point(s) "
          f"-> {args.json}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quad-tol", type=float, default=1e-8,
                        help="singular quadrature tolerance (default 1e-8)")
    common.add_argument("--ode-tol", type=float, default=1e-10,
                        help="orbit integration tolerance (default 1e-10)")
    common.add_argument("--root-tol", type=float, default=1e-12,
                        help="root localization tolerance (default 1e-12)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed reserved for randomized property sweeps")

    parser = _Parser(prog="kappaflow",
                     description="Closed and simple closed planar curves "
                                 "with curvature prescribed by position.")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common],
                       help="count and locate the simple closed solutions")
    p.add_argument("--model", required=True,
                   help="monomial:a=<float>,delta=<float> or example:<id>")
    p.add_argument("--json", required=True, help="report output path")
    p.add_argument("--png", help="optional winding-profile figure")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("winding", parents=[common],
                       help="net-winding profile on a radial grid")
    p.add_argument("--model", required=True)
    p.add_argument("--grid", type=int, default=25,
                   help="number of interior grid points (default 25)")
    p.add_argument("--method", choices=("quad", "ode", "both"),
                   default="quad")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--png", help="optional profile figure")
    p.set_defaults(func=_cmd_winding)

    p = sub.add_parser("portrait", parents=[common],
                       help="sampled orbits of the auxiliary flow")
    p.add_argument("--model", required=True)
    p.add_argument("--z0", action="append", required=True,
                   help="starting point RE or RE,IM; repeatable")
    p.add_argument("--duration", type=float, default=None,
                   help="time horizon (default: one detected period)")
    p.add_argument("--num", type=int, default=2048,
                   help="samples per orbit (default 2048)")
    p.add_argument("--csv", help="CSV output path (t, re, im)")
    p.add_argument("--svg", help="SVG output path")
    p.add_argument("--png", help="optional phase-plane figure")
    p.set_defaults(func=_cmd_portrait)

    p = sub.add_parser("curve", parents=[common],
                       help="reconstruct the solution curve through radius s")
    p.add_argument("--model", required=True)
    p.add_argument("--s", type=float, required=True,
                   help="starting radius (initial point s*exp(i*theta0))")
    p.add_argument("--n", type=int, default=2,
                   help="half-periods to integrate; 2n closes a record "
                        "with winding 1/n (default 2)")
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--num", type=int, default=4096,
                   help="number of curve samples (default 4096)")
    p.add_argument("--svg", required=True, help="SVG output path")
    p.add_argument("--csv", help="optional CSV output path")
    p.add_argument("--png", help="optional plane figure")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("verify", parents=[common],
                       help="run the exact positivity and inequality checks")
    p.add_argument("--suite", choices=("p", "q", "p51", "gautschi", "all"),
                   default="all")
    p.add_argument("--json", help="certificate output path (default stdout)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("supplement", parents=[common],
                       help="normal-coordinate law: nu profile and records")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--nu-grid", type=int, default=25,
                   help="number of nu grid points (default 25)")
    p.add_argument("--classify", action="store_true",
                   help="also search for closed simple solutions")
    p.add_argument("--json", required=True, help="report output path")
    p.add_argument("--png", help="optional nu-profile figure")
    p.set_defaults(func=_cmd_supplement)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = RunConfig(quad_tol=args.quad_tol, ode_tol=args.ode_tol,
                           root_tol=args.root_tol, seed=args.seed)
        return args.func(args, config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
