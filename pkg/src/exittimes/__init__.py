"""Mean exit times of Brownian motion from planar domains.

Closed-form evaluation for a catalog of Euclidean and hyperbolic domains,
cross-checked by a stochastic simulator (Euler scheme and walk on spheres)
and a finite-difference solver on masked grids.  The diffusion convention
throughout is the one whose generator is the full Laplace operator, not
half of it.
"""

from .charts import BASE_POINT, Chart, ChartError, Point2, conformal_factor, convert
from .closed_form import (
    FamilyConstants,
    UnboundedDomainError,
    exhaustion_ellipse,
    exit_time,
    family_term,
    torsional_rigidity,
)
from .domains import (
    AngularSector,
    Annulus,
    Domain,
    DomainParseError,
    Ellipse,
    GeodesicHalfNbhd,
    GeodesicNbhd,
    Horodisk,
    HyperbolaConcave,
    HyperbolaConvex,
    HyperbolicDisk,
    IdealNbhd,
    OutsideDomainError,
    Parabola,
    boundary_distance_lb,
    contains,
    format_domain,
    is_bounded,
    is_euclidean,
    is_finite_exit,
    native_chart,
    parse_domain,
)
from .pde import (
    GridSolution,
    SolverConvergenceError,
    TruncationRequiredError,
    exhaustion_run,
    grid_chart,
    solve_grid,
)
from .report import PointCheck, RunReport, build_report, report_csv, report_table
from .stochastic import MCConfig, MCEstimate, simulate_exit

__version__ = "0.1.0"

__all__ = [
    "AngularSector",
    "Annulus",
    "BASE_POINT",
    "Chart",
    "ChartError",
    "Domain",
    "DomainParseError",
    "Ellipse",
    "FamilyConstants",
    "GeodesicHalfNbhd",
    "GeodesicNbhd",
    "GridSolution",
    "Horodisk",
    "HyperbolaConcave",
    "HyperbolaConvex",
    "HyperbolicDisk",
    "IdealNbhd",
    "MCConfig",
    "MCEstimate",
    "OutsideDomainError",
    "Parabola",
    "PointCheck",
    "Point2",
    "RunReport",
    "SolverConvergenceError",
    "TruncationRequiredError",
    "UnboundedDomainError",
    "boundary_distance_lb",
    "build_report",
    "conformal_factor",
    "contains",
    "convert",
    "exhaustion_ellipse",
    "exhaustion_run",
    "exit_time",
    "family_term",
    "format_domain",
    "grid_chart",
    "is_bounded",
    "is_euclidean",
    "is_finite_exit",
    "native_chart",
    "parse_domain",
    "report_csv",
    "report_table",
    "simulate_exit",
    "solve_grid",
    "torsional_rigidity",
]
