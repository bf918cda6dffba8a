"""Planar coordinate charts and conversions.

Two metric families share these charts:

* Euclidean plane: ``EUCLIDEAN`` (x, y) and ``EUCLIDEAN_POLAR`` (r, theta).
* Hyperbolic plane, in four models: ``HALF_PLANE`` (x, y) on {x > 0} with
  metric (dx^2 + dy^2) / x^2; ``HALF_PLANE_POLAR`` (r, theta), r > 0 and
  |theta| < pi/2; ``UNIT_DISK`` (x, y) on {x^2 + y^2 < 1} with metric
  4 (dx^2 + dy^2) / (1 - x^2 - y^2)^2; and ``GEODESIC_POLAR`` (r, theta),
  geodesic distance r >= 0 and direction theta around ``BASE_POINT``.

The half-plane and the unit disk are identified by the Mobius map
w = (z - 1) / (z + 1), which sends the half-plane base point (1, 0) to the
disk center. Geodesic polar coordinates are read off in the disk model:
(r, theta) corresponds to w = tanh(r/2) * exp(i*theta).

Conversions are defined within one family only; mixing families raises
:class:`ChartError`. The ``*_xy`` helpers accept floats or numpy arrays and
skip range validation; the :class:`Point2` path validates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Chart",
    "ChartError",
    "Point2",
    "BASE_POINT",
    "EUCLIDEAN_CHARTS",
    "HYPERBOLIC_CHARTS",
    "convert",
    "convert_xy",
    "conformal_factor",
    "half_plane_distance",
    "axis_offset",
    "same_family",
]


class ChartError(ValueError):
    """Invalid chart coordinates or an undefined chart conversion."""


class Chart(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    EUCLIDEAN_POLAR = "euclidean-polar"
    HALF_PLANE = "half-plane"
    HALF_PLANE_POLAR = "half-plane-polar"
    UNIT_DISK = "unit-disk"
    GEODESIC_POLAR = "geodesic-polar"

    def __str__(self) -> str:  # argparse/help friendliness
        return self.value


EUCLIDEAN_CHARTS = frozenset({Chart.EUCLIDEAN, Chart.EUCLIDEAN_POLAR})
HYPERBOLIC_CHARTS = frozenset(
    {Chart.HALF_PLANE, Chart.HALF_PLANE_POLAR, Chart.UNIT_DISK, Chart.GEODESIC_POLAR}
)

# Half-plane point identified with the origin of geodesic polar coordinates
# and with the center of the unit disk.
BASE_POINT = (1.0, 0.0)


def same_family(a: Chart, b: Chart) -> bool:
    """True when a conversion between the two charts is defined."""
    return (a in EUCLIDEAN_CHARTS) == (b in EUCLIDEAN_CHARTS)


def _validate(u: float, v: float, chart: Chart) -> None:
    if not (np.isfinite(u) and np.isfinite(v)):
        raise ChartError(f"non-finite coordinates ({u}, {v}) in chart {chart.value}")
    if chart is Chart.EUCLIDEAN_POLAR:
        if u < 0:
            raise ChartError(f"euclidean-polar radius must be >= 0, got {u}")
    elif chart is Chart.HALF_PLANE:
        if u <= 0:
            raise ChartError(f"half-plane requires x > 0, got x = {u}")
    elif chart is Chart.HALF_PLANE_POLAR:
        if u <= 0 or abs(v) >= np.pi / 2:
            raise ChartError(
                f"half-plane-polar requires r > 0 and |theta| < pi/2, got ({u}, {v})"
            )
    elif chart is Chart.UNIT_DISK:
        if u * u + v * v >= 1.0:
            raise ChartError(f"unit-disk requires x^2 + y^2 < 1, got ({u}, {v})")
    elif chart is Chart.GEODESIC_POLAR:
        if u < 0:
            raise ChartError(f"geodesic-polar radius must be >= 0, got {u}")


@dataclass(frozen=True)
class Point2:
    """A point tagged with the chart its coordinates live in."""

    u: float
    v: float
    chart: Chart

    def __post_init__(self) -> None:
        _validate(self.u, self.v, self.chart)


def _polar_to_cart(r, t):
    return r * np.cos(t), r * np.sin(t)


def _cart_to_polar(x, y):
    r = np.hypot(x, y)
    t = np.where(r > 0, np.arctan2(y, x), 0.0)
    return r, t + 0.0


def _disk_to_half_plane(u, v):
    # z = (1 + w) / (1 - w)
    denom = (1.0 - u) ** 2 + v * v
    return (1.0 - u * u - v * v) / denom, 2.0 * v / denom


def _half_plane_to_disk(x, y):
    # w = (z - 1) / (z + 1)
    denom = (x + 1.0) ** 2 + y * y
    return (x * x + y * y - 1.0) / denom, 2.0 * y / denom


def _to_hub(u, v, chart: Chart):
    if chart in (Chart.EUCLIDEAN, Chart.HALF_PLANE):
        return u + 0.0, v + 0.0
    if chart in (Chart.EUCLIDEAN_POLAR, Chart.HALF_PLANE_POLAR):
        return _polar_to_cart(u, v)
    if chart is Chart.UNIT_DISK:
        return _disk_to_half_plane(u, v)
    if chart is Chart.GEODESIC_POLAR:
        rho = np.tanh(u / 2.0)
        return _disk_to_half_plane(rho * np.cos(v), rho * np.sin(v))
    raise ChartError(f"unknown chart {chart!r}")


def _from_hub(x, y, chart: Chart):
    if chart in (Chart.EUCLIDEAN, Chart.HALF_PLANE):
        return x + 0.0, y + 0.0
    if chart in (Chart.EUCLIDEAN_POLAR, Chart.HALF_PLANE_POLAR):
        return _cart_to_polar(x, y)
    if chart is Chart.UNIT_DISK:
        return _half_plane_to_disk(x, y)
    if chart is Chart.GEODESIC_POLAR:
        wu, wv = _half_plane_to_disk(x, y)
        rho = np.hypot(wu, wv)
        r = 2.0 * np.arctanh(rho)
        t = np.where(rho > 0, np.arctan2(wv, wu), 0.0)
        return r, t + 0.0
    raise ChartError(f"unknown chart {chart!r}")


def convert_xy(u, v, src: Chart, dst: Chart):
    """Convert coordinates between charts of the same family.

    Accepts scalars or numpy arrays; performs no range validation. The hub
    chart is Cartesian (``EUCLIDEAN`` resp. ``HALF_PLANE``).
    """
    if not same_family(src, dst):
        raise ChartError(
            f"no conversion between {src.value} and {dst.value}: "
            "one is Euclidean, the other hyperbolic"
        )
    if src is dst:
        return u + 0.0, v + 0.0
    x, y = _to_hub(u, v, src)
    return _from_hub(x, y, dst)


def convert(pt: Point2, target: Chart) -> Point2:
    """Return the same geometric point expressed in the target chart."""
    _validate(pt.u, pt.v, pt.chart)
    u, v = convert_xy(pt.u, pt.v, pt.chart, target)
    return Point2(float(u), float(v), target)


def conformal_factor(chart: Chart, u, v):
    """Metric factor phi with metric = phi * (du^2 + dv^2).

    Defined for the Cartesian-type charts only: 1 on the Euclidean plane,
    1/x^2 on the half-plane, 4/(1 - x^2 - y^2)^2 on the unit disk. Scalars
    raise :class:`ChartError` outside the chart's range.
    """
    if chart is Chart.EUCLIDEAN:
        return np.ones_like(np.asarray(u, dtype=float)) if np.ndim(u) else 1.0
    if chart is Chart.HALF_PLANE:
        if np.ndim(u) == 0 and u <= 0:
            raise ChartError(f"half-plane requires x > 0, got x = {u}")
        return 1.0 / (u * u)
    if chart is Chart.UNIT_DISK:
        s = 1.0 - u * u - v * v
        if np.ndim(s) == 0 and s <= 0:
            raise ChartError(f"unit-disk requires x^2 + y^2 < 1, got ({u}, {v})")
        return 4.0 / (s * s)
    raise ChartError(f"conformal factor undefined for chart {chart.value}")


def half_plane_distance(x1, y1, x2, y2):
    """Hyperbolic distance between two half-plane points (array-friendly)."""
    q = ((x1 - x2) ** 2 + (y1 - y2) ** 2) / (2.0 * x1 * x2)
    return np.arccosh(1.0 + q)


def axis_offset(theta):
    """Signed hyperbolic distance from a half-plane-polar point to the axis.

    The ray theta = 0 is a geodesic; a point at angle theta lies at distance
    |arcsinh(tan theta)| from it, independent of r.
    """
    return np.arcsinh(np.tan(theta))
