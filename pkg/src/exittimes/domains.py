"""Domain catalog: eleven planar regions with membership and boundary data.

Six Euclidean domains (ellipse, parabola interior, annulus, angular sector,
convex hyperbola side, concave region between hyperbola branches) and five
hyperbolic ones (disk, horodisk, two-sided and one-sided geodesic
neighborhoods, ideal-point neighborhood). Each domain fixes a native chart;
operations convert incoming points on entry.

The module also provides the domain-string grammar ``kind:key=value,...``
used by the CLI and config files, and positive lower bounds on the metric
distance to the boundary (exact where a closed expression exists, a
conservative nearest-boundary-point search for the conic domains).
"""

from __future__ import annotations

import math
from dataclasses import MISSING, dataclass, fields
from typing import Union

import numpy as np

from .charts import (
    BASE_POINT,
    Chart,
    ChartError,
    Point2,
    axis_offset,
    convert_xy,
    half_plane_distance,
    same_family,
)

__all__ = [
    "Ellipse",
    "Parabola",
    "Annulus",
    "AngularSector",
    "HyperbolaConvex",
    "HyperbolaConcave",
    "HyperbolicDisk",
    "Horodisk",
    "GeodesicNbhd",
    "GeodesicHalfNbhd",
    "IdealNbhd",
    "Domain",
    "DomainParseError",
    "OutsideDomainError",
    "parse_domain",
    "format_domain",
    "kind_name",
    "native_chart",
    "is_euclidean",
    "is_finite_exit",
    "is_bounded",
    "contains",
    "contains_xy",
    "boundary_distance_lb",
    "boundary_distance_lb_xy",
]


class DomainParseError(ValueError):
    """Malformed domain spec string; the message names the offending token."""


class OutsideDomainError(ValueError):
    """A point that must lie inside the domain does not."""


@dataclass(frozen=True)
class Ellipse:
    a: float
    b: float
    h: float = 0.0
    k: float = 0.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"ellipse semi-axes must be positive, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class Parabola:
    p: float  # focal distance; region 4 p x > y^2

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError(f"parabola focal distance must be positive, got p={self.p}")


@dataclass(frozen=True)
class Annulus:
    a: float
    b: float

    def __post_init__(self):
        if not 0 < self.a < self.b:
            raise ValueError(f"annulus needs 0 < a < b, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class AngularSector:
    alpha: float  # full opening angle; region |theta| < alpha / 2

    def __post_init__(self):
        if not 0 < self.alpha < math.pi:
            raise ValueError(f"sector angle must lie in (0, pi), got alpha={self.alpha}")

    @property
    def m(self) -> float:
        """Slope of the rectangular form: the region is m*x > |y| rotated onto the axis."""
        return math.tan(self.alpha / 2.0)


@dataclass(frozen=True)
class _HyperbolaBase:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"hyperbola needs a > 0 and b > 0, got a={self.a}, b={self.b}")

    @property
    def m(self) -> float:
        return self.b / self.a

    @property
    def mu(self) -> float:
        return math.atan(self.b / self.a)

    @property
    def c(self) -> float:
        """Distance from the center to either focus."""
        return math.hypot(self.a, self.b)


class HyperbolaConvex(_HyperbolaBase):
    """Region x^2/a^2 - y^2/b^2 > 1 with x > 0 (inside one branch)."""


class HyperbolaConcave(_HyperbolaBase):
    """Region x^2/a^2 - y^2/b^2 > -1 (between the two branches)."""


@dataclass(frozen=True)
class HyperbolicDisk:
    R: float  # hyperbolic radius around the base point

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"hyperbolic disk radius must be positive, got R={self.R}")


@dataclass(frozen=True)
class Horodisk:
    R: float  # region x > R in the half-plane

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"horodisk parameter must be positive, got R={self.R}")


@dataclass(frozen=True)
class GeodesicNbhd:
    alpha: float  # half-angle; region |theta| < alpha in half-plane polar

    def __post_init__(self):
        if not 0 < self.alpha < math.pi / 2:
            raise ValueError(
                f"geodesic neighborhood angle must lie in (0, pi/2), got alpha={self.alpha}"
            )

    @property
    def tube_radius(self) -> float:
        """Hyperbolic distance from the axis geodesic to the boundary."""
        return math.log(math.cos(self.alpha) / (1.0 - math.sin(self.alpha)))


@dataclass(frozen=True)
class GeodesicHalfNbhd:
    alpha: float  # region 0 < theta < alpha in half-plane polar

    def __post_init__(self):
        if not 0 < self.alpha < math.pi / 2:
            raise ValueError(
                f"one-sided neighborhood angle must lie in (0, pi/2), got alpha={self.alpha}"
            )


@dataclass(frozen=True)
class IdealNbhd:
    """Region 0 < theta < pi/2 in half-plane polar (a quadrant at an ideal point)."""


Domain = Union[
    Ellipse,
    Parabola,
    Annulus,
    AngularSector,
    HyperbolaConvex,
    HyperbolaConcave,
    HyperbolicDisk,
    Horodisk,
    GeodesicNbhd,
    GeodesicHalfNbhd,
    IdealNbhd,
]

_KINDS = {
    "ellipse": Ellipse,
    "parabola": Parabola,
    "annulus": Annulus,
    "sector": AngularSector,
    "hyperbola-convex": HyperbolaConvex,
    "hyperbola-concave": HyperbolaConcave,
    "hdisk": HyperbolicDisk,
    "horodisk": Horodisk,
    "geodesic-nbhd": GeodesicNbhd,
    "geodesic-halfnbhd": GeodesicHalfNbhd,
    "ideal-nbhd": IdealNbhd,
}
_KIND_NAMES = {cls: name for name, cls in _KINDS.items()}

_NATIVE_CHART = {
    Ellipse: Chart.EUCLIDEAN,
    Parabola: Chart.EUCLIDEAN,
    Annulus: Chart.EUCLIDEAN_POLAR,
    AngularSector: Chart.EUCLIDEAN_POLAR,
    HyperbolaConvex: Chart.EUCLIDEAN,
    HyperbolaConcave: Chart.EUCLIDEAN,
    HyperbolicDisk: Chart.GEODESIC_POLAR,
    Horodisk: Chart.HALF_PLANE,
    GeodesicNbhd: Chart.HALF_PLANE_POLAR,
    GeodesicHalfNbhd: Chart.HALF_PLANE_POLAR,
    IdealNbhd: Chart.HALF_PLANE_POLAR,
}


def kind_name(domain: Domain) -> str:
    return _KIND_NAMES[type(domain)]


def native_chart(domain: Domain) -> Chart:
    return _NATIVE_CHART[type(domain)]


def is_euclidean(domain: Domain) -> bool:
    return native_chart(domain) in (Chart.EUCLIDEAN, Chart.EUCLIDEAN_POLAR)


def is_finite_exit(domain: Domain) -> bool:
    """Finiteness dichotomy of the expected exit time."""
    if isinstance(domain, AngularSector):
        return domain.alpha < math.pi / 2
    if isinstance(domain, (HyperbolaConvex, HyperbolaConcave)):
        return domain.b < domain.a
    if isinstance(domain, IdealNbhd):
        return False
    return True


def is_bounded(domain: Domain) -> bool:
    return isinstance(domain, (Ellipse, Annulus, HyperbolicDisk))


def parse_domain(text: str) -> Domain:
    """Parse the ``kind:key=value,...`` grammar, naming bad tokens in errors."""
    text = text.strip()
    if not text:
        raise DomainParseError("empty domain spec")
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind not in _KINDS:
        raise DomainParseError(
            f"unknown domain kind '{kind}' (known: {', '.join(sorted(_KINDS))})"
        )
    cls = _KINDS[kind]
    params: dict[str, float] = {}
    if rest.strip():
        for token in rest.split(","):
            token = token.strip()
            if not token:
                continue
            key, eq, value = token.partition("=")
            key = key.strip()
            if not eq:
                raise DomainParseError(f"expected key=value, got '{token}' in '{text}'")
            try:
                params[key] = float(value.strip())
            except ValueError:
                raise DomainParseError(
                    f"value for key '{key}' is not a number: '{value.strip()}'"
                ) from None
    allowed = {f.name for f in fields(cls)}
    for key in params:
        if key not in allowed:
            raise DomainParseError(
                f"unknown key '{key}' for domain kind '{kind}'"
                + (f" (allowed: {', '.join(sorted(allowed))})" if allowed else "")
            )
    missing = [
        f.name for f in fields(cls) if f.name not in params and f.default is MISSING
    ]
    if missing:
        raise DomainParseError(f"missing key '{missing[0]}' for domain kind '{kind}'")
    try:
        return cls(**params)
    except ValueError as exc:
        raise DomainParseError(str(exc)) from None


def format_domain(domain: Domain) -> str:
    """Canonical spec string; round-trips through :func:`parse_domain`."""
    name = kind_name(domain)
    parts = [f"{f.name}={getattr(domain, f.name)!r}" for f in fields(domain)]
    return name if not parts else f"{name}:{','.join(parts)}"


# --- membership ------------------------------------------------------------

def _as_chart(domain: Domain, u, v, chart: Chart):
    """Coordinates of (u, v, chart) in the domain's membership chart."""
    target = native_chart(domain)
    if isinstance(domain, (Annulus, AngularSector)):
        target = Chart.EUCLIDEAN
    elif isinstance(domain, (HyperbolicDisk, Horodisk, GeodesicNbhd, GeodesicHalfNbhd, IdealNbhd)):
        target = Chart.HALF_PLANE
    if not same_family(chart, target):
        raise ChartError(
            f"{kind_name(domain)} lives in the "
            f"{'Euclidean' if is_euclidean(domain) else 'hyperbolic'} plane; "
            f"chart {chart.value} does not"
        )
    return convert_xy(u, v, chart, target)


def contains_xy(domain: Domain, u, v, chart: Chart):
    """Vectorized strict membership test; boundary points test False.

    Hyperbolic kernels are evaluated in half-plane coordinates and treat
    points with x <= 0 (outside the chart) as outside the domain.
    """
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        if isinstance(domain, Ellipse):
            x, y = _as_chart(domain, u, v, chart)
            return ((x - domain.h) / domain.a) ** 2 + ((y - domain.k) / domain.b) ** 2 < 1.0
        if isinstance(domain, Parabola):
            x, y = _as_chart(domain, u, v, chart)
            return 4.0 * domain.p * x > y * y
        if isinstance(domain, Annulus):
            x, y = _as_chart(domain, u, v, chart)
            r2 = x * x + y * y
            return (r2 > domain.a**2) & (r2 < domain.b**2)
        if isinstance(domain, AngularSector):
            x, y = _as_chart(domain, u, v, chart)
            # rectangular form of |theta| < alpha/2 avoids atan2 on the axis
            return domain.m * x > np.abs(y)
        if isinstance(domain, HyperbolaConvex):
            x, y = _as_chart(domain, u, v, chart)
            return (x > 0) & ((x / domain.a) ** 2 - (y / domain.b) ** 2 > 1.0)
        if isinstance(domain, HyperbolaConcave):
            x, y = _as_chart(domain, u, v, chart)
            return (x / domain.a) ** 2 - (y / domain.b) ** 2 > -1.0
        if isinstance(domain, HyperbolicDisk):
            x, y = _as_chart(domain, u, v, chart)
            ok = x > 0
            xs = np.where(ok, x, 1.0)
            d = half_plane_distance(xs, y, BASE_POINT[0], BASE_POINT[1])
            return ok & (d < domain.R)
        if isinstance(domain, Horodisk):
            x, _ = _as_chart(domain, u, v, chart)
            return x > domain.R
        if isinstance(domain, (GeodesicNbhd, GeodesicHalfNbhd, IdealNbhd)):
            x, y = _as_chart(domain, u, v, chart)
            ok = x > 0
            t = np.arctan2(y, np.where(ok, x, 1.0))
            if isinstance(domain, GeodesicNbhd):
                return ok & (np.abs(t) < domain.alpha)
            hi = domain.alpha if isinstance(domain, GeodesicHalfNbhd) else math.pi / 2
            return ok & (t > 0) & (t < hi)
    raise TypeError(f"unknown domain {domain!r}")


def contains(domain: Domain, pt: Point2) -> bool:
    """Strict membership for a tagged point."""
    return bool(contains_xy(domain, pt.u, pt.v, pt.chart))


# --- distance to the boundary ----------------------------------------------

def _golden_refine(d2, lo, hi, iters=60):
    """Vectorized golden-section minimization of d2 over per-point brackets."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo.copy(), hi.copy()
    for _ in range(iters):
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        shrink_left = d2(c) <= d2(d)
        b = np.where(shrink_left, d, b)
        a = np.where(shrink_left, a, c)
    t = 0.5 * (a + b)
    return t, d2(t)


def _nearest_on_curve(px, py, curve, seeds):
    """Conservative distance from points to a parametric curve.

    Seeds the search on a parameter grid, golden-refines the best bracket per
    point, and keeps a 1% safety margin so the result stays a lower bound on
    the true nearest distance even if refinement is slightly off.
    """
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    scalar = px.ndim == 0
    px, py = np.atleast_1d(px), np.atleast_1d(py)

    def d2_at(t):
        cx, cy = curve(t)
        return (cx - px) ** 2 + (cy - py) ** 2

    vals = d2_at(seeds[:, None]).T  # (npts, nseeds)
    best = np.argmin(vals, axis=1)
    lo = seeds[np.maximum(best - 1, 0)]
    hi = seeds[np.minimum(best + 1, len(seeds) - 1)]
    _, d2min = _golden_refine(d2_at, lo, hi)
    out = 0.99 * np.sqrt(d2min)
    return float(out[0]) if scalar else out


def boundary_distance_lb_xy(domain: Domain, u, v, chart: Chart):
    """Vectorized positive lower bound on the metric distance to the boundary.

    Exact for circles, the annulus, the sector, and all hyperbolic domains;
    conservative (nearest-point search times 0.99) for the other conic
    domains. Inputs are assumed inside the domain.
    """
    if isinstance(domain, Ellipse):
        x, y = _as_chart(domain, u, v, chart)
        if domain.a == domain.b:
            # circle: exact radial distance, no search needed
            return domain.a - np.hypot(x - domain.h, y - domain.k)
        seeds = np.linspace(0.0, 2.0 * math.pi, 33)
        return _nearest_on_curve(
            x, y,
            lambda t: (domain.h + domain.a * np.cos(t), domain.k + domain.b * np.sin(t)),
            seeds,
        )
    if isinstance(domain, Parabola):
        x, y = _as_chart(domain, u, v, chart)
        span = float(np.max(np.abs(y)) + np.sqrt(4.0 * domain.p * np.max(x)) + 4.0 * domain.p + 1.0)
        seeds = np.linspace(-span, span, 49)
        return _nearest_on_curve(
            x, y, lambda s: (s * s / (4.0 * domain.p), s), seeds
        )
    if isinstance(domain, HyperbolaConvex):
        x, y = _as_chart(domain, u, v, chart)
        span = float(np.arcsinh(np.max(np.abs(y)) / domain.b) + np.arcsinh(np.max(x) / domain.a) + 2.0)
        seeds = np.linspace(-span, span, 49)
        return _nearest_on_curve(
            x, y,
            lambda s: (domain.a * np.cosh(s), domain.b * np.sinh(s)),
            seeds,
        )
    if isinstance(domain, HyperbolaConcave):
        x, y = _as_chart(domain, u, v, chart)
        span = float(np.arcsinh((np.max(np.abs(x)) + domain.a) / domain.a) + 2.0)
        seeds = np.linspace(-span, span, 49)
        up = _nearest_on_curve(
            x, y, lambda s: (domain.a * np.sinh(s), domain.b * np.cosh(s)), seeds
        )
        dn = _nearest_on_curve(
            x, y, lambda s: (domain.a * np.sinh(s), -domain.b * np.cosh(s)), seeds
        )
        return np.minimum(up, dn)
    if isinstance(domain, Annulus):
        x, y = _as_chart(domain, u, v, chart)
        r = np.hypot(x, y)
        return np.minimum(r - domain.a, domain.b - r)
    if isinstance(domain, AngularSector):
        x, y = _as_chart(domain, u, v, chart)
        r = np.hypot(x, y)
        t = np.arctan2(y, x)
        return r * np.sin(domain.alpha / 2.0 - np.abs(t))
    if isinstance(domain, HyperbolicDisk):
        x, y = _as_chart(domain, u, v, chart)
        return domain.R - half_plane_distance(x, y, BASE_POINT[0], BASE_POINT[1])
    if isinstance(domain, Horodisk):
        x, _ = _as_chart(domain, u, v, chart)
        return np.log(x / domain.R)
    if isinstance(domain, (GeodesicNbhd, GeodesicHalfNbhd, IdealNbhd)):
        x, y = _as_chart(domain, u, v, chart)
        off = axis_offset(np.arctan2(y, x))
        if isinstance(domain, GeodesicNbhd):
            return domain.tube_radius - np.abs(off)
        if isinstance(domain, GeodesicHalfNbhd):
            ceiling = axis_offset(domain.alpha)
            return np.minimum(off, ceiling - off)
        return off + 0.0
    raise TypeError(f"unknown domain {domain!r}")


def boundary_distance_lb(domain: Domain, pt: Point2) -> float:
    """Scalar boundary distance lower bound; the point must be inside."""
    if not contains(domain, pt):
        raise OutsideDomainError(
            f"point ({pt.u}, {pt.v}) [{pt.chart.value}] is not inside {format_domain(domain)}"
        )
    return float(boundary_distance_lb_xy(domain, pt.u, pt.v, pt.chart))
