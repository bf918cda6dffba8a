"""Command-line front end.

Subcommands: eval, simulate, solve, validate, rigidity, domains list.

Exit codes: 0 success (for validate: every row passed); 1 validate had
failing rows; 2 parse or usage errors (the offending token is named);
3 probe point outside the domain (or not representable in its charts);
4 missing truncation box for an unbounded domain; 5 torsional rigidity
requested for an unbounded or infinite-exit domain.

Any flag may also be supplied through a JSON config file (--config);
explicit command-line flags win over config values.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields

from .charts import Chart, ChartError, Point2
from .closed_form import (
    FamilyConstants,
    UnboundedDomainError,
    exit_time,
    family_term,
    torsional_rigidity,
)
from .domains import (
    _KINDS,
    DomainParseError,
    OutsideDomainError,
    is_finite_exit,
    native_chart,
    parse_domain,
)
from .pde import TruncationRequiredError, grid_chart, solve_grid
from .report import build_report, render_figure, report_csv, report_table
from .stochastic import MCConfig, simulate_exit

_INFINITE_NOTES = {
    "sector": "exit time infinite when alpha >= pi/2",
    "hyperbola-convex": "exit time infinite when b >= a",
    "hyperbola-concave": "exit time infinite when b >= a",
    "ideal-nbhd": "exit time always infinite",
}


def _g(x: float) -> str:
    return f"{x:.9g}"


def _load_config(path):
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise DomainParseError(f"config file {path!r} must hold a JSON object")
    return data


class _Opts:
    """Flag values merged with config-file values and hard defaults."""

    def __init__(self, args, defaults):
        self._args = args
        self._cfg = _load_config(getattr(args, "config", None))
        self._defaults = defaults

    def __getattr__(self, key):
        val = getattr(self._args, key, None)
        if val is None:
            val = self._cfg.get(key, self._defaults.get(key))
        return val


def _parse_pair(text, what):
    parts = text.split(",")
    if len(parts) != 2:
        raise DomainParseError(f"invalid {what} {text!r} (expected u,v)")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise DomainParseError(f"invalid {what} {text!r} (expected two numbers)")


def _parse_box(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise DomainParseError(
            f"invalid box {text!r} (expected umin,umax,vmin,vmax)"
        )
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise DomainParseError(f"invalid box {text!r} (expected four numbers)")


def _resolve_chart(opts, domain):
    name = opts.chart
    if name is None:
        return native_chart(domain)
    try:
        return Chart(name)
    except ValueError:
        raise DomainParseError(f"unknown chart {name!r}")


def _gather_points(opts, chart):
    pairs = []
    for text in opts.point or []:
        pairs.append(_parse_pair(text, "point"))
    if opts.points is not None:
        with open(opts.points, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                pairs.append(_parse_pair(body, f"point at {opts.points}:{lineno}"))
    if not pairs:
        raise DomainParseError("no probe points given (use --point or --points)")
    return [Point2(u, v, chart) for u, v in pairs]


def _parse_family(text):
    consts = {}
    for item in text.split(","):
        if "=" not in item:
            raise DomainParseError(f"invalid family constant {item!r} (expected key=value)")
        key, _, raw = item.partition("=")
        key = key.strip()
        if key not in ("a", "b", "cinf"):
            raise DomainParseError(f"unknown family constant key {key!r}")
        try:
            consts[key] = float(raw)
        except ValueError:
            raise DomainParseError(f"invalid family constant value {raw!r} for {key!r}")
    return FamilyConstants(**consts)


def _mc_config(opts):
    return MCConfig(
        paths=int(opts.paths),
        dt=float(opts.dt),
        seed=int(opts.seed),
        t_max=float(opts.t_max),
        method=str(opts.method),
        wos_eps=float(opts.wos_eps),
        workers=int(opts.workers),
    )


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args):
    opts = _Opts(args, {})
    domain = parse_domain(opts.domain)
    chart = _resolve_chart(opts, domain)
    points = _gather_points(opts, chart)
    consts = _parse_family(opts.family) if opts.family is not None else None
    for pt in points:
        val = exit_time(domain, pt)
        if consts is not None:
            val = val + family_term(domain, pt, consts)
        print(f"{_g(pt.u)} {_g(pt.v)} {_g(val)}")
    return 0


_SIM_DEFAULTS = {
    "paths": 100_000,
    "dt": 1e-4,
    "seed": 0,
    "t_max": 100.0,
    "method": "euler",
    "wos_eps": 1e-4,
    "workers": 1,
}


def cmd_simulate(args):
    opts = _Opts(args, _SIM_DEFAULTS)
    domain = parse_domain(opts.domain)
    chart = _resolve_chart(opts, domain)
    u, v = _parse_pair(opts.point, "point")
    pt = Point2(u, v, chart)
    sim_chart = Chart(opts.sim_chart) if opts.sim_chart is not None else None
    est = simulate_exit(domain, pt, _mc_config(opts), chart=sim_chart)
    out = {
        "censored_fraction": est.censored_fraction,
        "mean": est.mean,
        "n": est.n,
        "seed": int(opts.seed),
        "stderr": est.stderr,
    }
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_solve(args):
    opts = _Opts(args, {})
    domain = parse_domain(opts.domain)
    h = float(opts.h) if opts.h is not None else 0.01
    bbox = _parse_box(opts.bbox) if isinstance(opts.bbox, str) else opts.bbox
    trunc = (
        _parse_box(opts.truncation)
        if isinstance(opts.truncation, str)
        else opts.truncation
    )
    sol = solve_grid(domain, h, bbox=bbox, truncation=trunc)
    csv_path, json_path = sol.write(opts.out)
    print(f"wrote {csv_path} and {json_path} (residual {_g(sol.residual)})")
    return 0


_VALIDATE_DEFAULTS = {
    "paths": 20_000,
    "dt": 2e-5,
    "seed": 0,
    "t_max": 100.0,
    "method": "euler",
    "wos_eps": 1e-4,
    "workers": 1,
    "grid_h": 0.01,
    "grid_tol": 5e-3,
}


def cmd_validate(args):
    opts = _Opts(args, _VALIDATE_DEFAULTS)
    domain = parse_domain(opts.domain)
    if not is_finite_exit(domain):
        print(
            f"error: {opts.domain!r} has infinite exit time; validate needs "
            "a finite-exit domain",
            file=sys.stderr,
        )
        return 2
    chart = _resolve_chart(opts, domain)
    points = _gather_points(opts, chart)
    trunc = (
        _parse_box(opts.truncation)
        if isinstance(opts.truncation, str)
        else opts.truncation
    )
    grid = solve_grid(domain, float(opts.grid_h), truncation=trunc)
    report = build_report(
        domain, points, _mc_config(opts), grid, grid_tol=float(opts.grid_tol)
    )
    print(report_table(report))
    if opts.json_out is not None:
        with open(opts.json_out, "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, sort_keys=True, indent=1)
            fh.write("\n")
    if opts.csv_out is not None:
        with open(opts.csv_out, "w", encoding="utf-8") as fh:
            fh.write(report_csv(report))
    if opts.figure is not None:
        render_figure(domain, grid, points, opts.figure)
    return 0 if report.passed else 1


def cmd_rigidity(args):
    opts = _Opts(args, {})
    domain = parse_domain(opts.domain)
    print(_g(torsional_rigidity(domain)))
    return 0


def cmd_domains(args):
    if args.action != "list":
        raise DomainParseError(f"unknown domains action {args.action!r}")
    for name, cls in _KINDS.items():
        params = ", ".join(f.name for f in fields(cls)) or "none"
        dom = None
        note = _INFINITE_NOTES.get(name, "")
        # use a representative instance to report charts
        samples = {
            "ellipse": "ellipse:a=2,b=1",
            "parabola": "parabola:p=1",
            "annulus": "annulus:a=1,b=2",
            "sector": "sector:alpha=1.0",
            "hyperbola-convex": "hyperbola-convex:a=2,b=1",
            "hyperbola-concave": "hyperbola-concave:a=2,b=1",
            "hdisk": "hdisk:R=1",
            "horodisk": "horodisk:R=1",
            "geodesic-nbhd": "geodesic-nbhd:alpha=0.8",
            "geodesic-halfnbhd": "geodesic-halfnbhd:alpha=0.8",
            "ideal-nbhd": "ideal-nbhd",
        }
        dom = parse_domain(samples[name])
        line = (
            f"{name:<19} params: {params:<12} native chart: "
            f"{native_chart(dom).value:<17} grid chart: {grid_chart(dom):<20}"
        )
        if note:
            line += f" [{note}]"
        print(line.rstrip())
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sub):
    sub.add_argument("--domain", required=True, help="domain spec, kind:key=value,...")
    sub.add_argument("--chart", help="chart of input points (default: native chart)")
    sub.add_argument("--config", help="JSON file supplying any omitted flag")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="exittimes",
        description="Closed-form mean exit times of Brownian motion with "
        "Monte Carlo and finite-difference cross-checks.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("eval", help="evaluate the closed form at points")
    _add_common(p)
    p.add_argument("--point", action="append", help="probe point u,v (repeatable)")
    p.add_argument("--points", help="file of points, one u,v per line, # comments")
    p.add_argument("--family", help="family constants a=..,b=..,cinf=..")
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("simulate", help="Monte Carlo estimate of the exit time")
    _add_common(p)
    p.add_argument("--point", required=True, help="start point u,v")
    p.add_argument("--paths", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--method", choices=["euler", "wos"])
    p.add_argument("--wos-eps", dest="wos_eps", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument(
        "--sim-chart",
        dest="sim_chart",
        help="chart to integrate in (hyperbolic domains: half-plane or unit-disk)",
    )
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("solve", help="finite-difference grid solution")
    _add_common(p)
    p.add_argument("--h", type=float, help="grid step (default 0.01)")
    p.add_argument("--bbox", help="grid box umin,umax,vmin,vmax in the grid chart")
    p.add_argument(
        "--truncation",
        help="truncation box umin,umax,vmin,vmax (required for unbounded domains)",
    )
    p.add_argument("--out", required=True, help="output prefix for .csv and .json")
    p.set_defaults(func=cmd_solve)

    p = subs.add_parser("validate", help="closed form vs MC vs grid at probe points")
    _add_common(p)
    p.add_argument("--point", action="append", help="probe point u,v (repeatable)")
    p.add_argument("--points", help="file of points, one u,v per line, # comments")
    p.add_argument("--paths", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--method", choices=["euler", "wos"])
    p.add_argument("--wos-eps", dest="wos_eps", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--grid-h", dest="grid_h", type=float)
    p.add_argument("--grid-tol", dest="grid_tol", type=float)
    p.add_argument("--truncation", help="truncation box for the grid leg")
    p.add_argument("--json-out", dest="json_out", help="write the report as JSON")
    p.add_argument("--csv-out", dest="csv_out", help="write the report as CSV")
    p.add_argument("--figure", help="render the grid heat map to this PNG path")
    p.set_defaults(func=cmd_validate)

    p = subs.add_parser("rigidity", help="torsional rigidity of a compact domain")
    _add_common(p)
    p.set_defaults(func=cmd_rigidity)

    p = subs.add_parser("domains", help="catalog information")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_domains)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OutsideDomainError, ChartError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TruncationRequiredError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except UnboundedDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
