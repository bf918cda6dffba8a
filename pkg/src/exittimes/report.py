"""Cross-validation reports: closed form vs Monte Carlo vs grid oracle.

A report row holds, for one probe point, the closed-form value, the MC
estimate, and the grid value, plus pass flags. A row passes when
|mc - closed| <= 4*stderr with no censored paths and |grid - closed| is
within the stated grid tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .charts import Point2
from .closed_form import exit_time
from .domains import Domain, format_domain
from .pde import GridSolution, to_grid_coords
from .stochastic import MCConfig, MCEstimate, simulate_exit

__all__ = ["PointCheck", "RunReport", "build_report", "report_table", "render_figure"]


@dataclass(frozen=True)
class PointCheck:
    u: float
    v: float
    closed: float
    mc: MCEstimate
    grid: float
    mc_pass: bool
    grid_pass: bool

    @property
    def passed(self) -> bool:
        return self.mc_pass and self.grid_pass


@dataclass
class RunReport:
    domain: str
    chart: str
    grid_tol: float
    rows: list

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def as_dict(self) -> dict:
        return {
            "domain": self.domain,
            "chart": self.chart,
            "grid_tol": self.grid_tol,
            "passed": self.passed,
            "rows": [
                {
                    "u": r.u,
                    "v": r.v,
                    "closed": r.closed,
                    "mc_mean": r.mc.mean,
                    "mc_stderr": r.mc.stderr,
                    "mc_censored_fraction": r.mc.censored_fraction,
                    "grid": r.grid,
                    "mc_pass": r.mc_pass,
                    "grid_pass": r.grid_pass,
                }
                for r in self.rows
            ],
        }


def build_report(
    domain: Domain,
    points: list[Point2],
    cfg: MCConfig,
    grid: GridSolution,
    grid_tol: float = 5e-3,
) -> RunReport:
    rows = []
    for pt in points:
        closed = exit_time(domain, pt)
        est = simulate_exit(domain, pt, cfg)
        gval = grid.value_at(pt)
        finite = math.isfinite(closed)
        mc_pass = (
            finite
            and est.censored_fraction == 0.0
            and abs(est.mean - closed) <= 4.0 * est.stderr
        )
        grid_pass = finite and abs(gval - closed) <= grid_tol
        rows.append(
            PointCheck(
                u=pt.u,
                v=pt.v,
                closed=closed,
                mc=est,
                grid=gval,
                mc_pass=mc_pass,
                grid_pass=grid_pass,
            )
        )
    return RunReport(
        domain=format_domain(domain),
        chart=str(points[0].chart) if points else "",
        grid_tol=grid_tol,
        rows=rows,
    )


def _g(x: float) -> str:
    return f"{x:.9g}"


def report_table(report: RunReport) -> str:
    head = (
        f"domain: {report.domain}   chart: {report.chart}   "
        f"grid_tol: {_g(report.grid_tol)}"
    )
    cols = ["u", "v", "closed", "mc", "stderr", "grid", "|mc-cf|", "|grid-cf|", "ok"]
    lines = [head]
    table = [cols]
    for r in report.rows:
        table.append(
            [
                _g(r.u),
                _g(r.v),
                _g(r.closed),
                _g(r.mc.mean),
                _g(r.mc.stderr),
                _g(r.grid),
                _g(abs(r.mc.mean - r.closed)),
                _g(abs(r.grid - r.closed)),
                "pass" if r.passed else "FAIL",
            ]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    for row in table:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    lines.append("result: " + ("pass" if report.passed else "FAIL"))
    return "\n".join(lines)


def report_csv(report: RunReport) -> str:
    out = ["u,v,closed,mc_mean,mc_stderr,mc_censored_fraction,grid,mc_pass,grid_pass"]
    for r in report.rows:
        out.append(
            f"{r.u:.12g},{r.v:.12g},{r.closed:.12g},{r.mc.mean:.12g},"
            f"{r.mc.stderr:.12g},{r.mc.censored_fraction:.12g},{r.grid:.12g},"
            f"{int(r.mc_pass)},{int(r.grid_pass)}"
        )
    return "\n".join(out) + "\n"


def render_figure(
    domain: Domain, grid: GridSolution, points: list[Point2], path: str
) -> None:
    """Heat map of the grid solution with probe points, written as PNG."""
    try:
        import matplotlib
    except ImportError:
        raise ValueError(
            "matplotlib is not installed; figures need the 'figure' extra"
        ) from None

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    u, v = grid.node_coords()
    data = np.where(grid.mask > 0, grid.values, np.nan)
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    mesh = ax.pcolormesh(u, v, data.T, shading="auto")
    fig.colorbar(mesh, ax=ax, label="mean exit time")
    if points:
        gp = [to_grid_coords(domain, pt) for pt in points]
        ax.plot([g[0] for g in gp], [g[1] for g in gp], "r+", markersize=10)
    ax.set_xlabel(f"u ({grid.grid_coords})")
    ax.set_ylabel(f"v ({grid.grid_coords})")
    ax.set_title(format_domain(domain))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
