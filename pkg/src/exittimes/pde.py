"""Finite-difference oracle for mean exit times.

Solves the Poisson problem f_uu + f_vv = -phi(u, v) on a rectangular
lattice in a chart where the domain is workable, with f = 0 on the true
boundary and on any artificial truncation edge. Truncation zeros make
every truncated solve a certified lower bound: the mean exit time of a
subdomain never exceeds that of the full domain.

Grid chart, source term, and linear solver by domain kind:

    ellipse             euclidean (x, y)      phi = 1                SOR
    parabola            euclidean (x, y)      phi = 1                SOR
    annulus             log-polar (s, theta)  phi = e^{2s}           CG
    sector              log-polar (s, theta)  phi = e^{2s}           CG
    hdisk               unit-disk (x, y)      phi = 4/(1-x^2-y^2)^2  SOR
    horodisk            half-plane (x, y)     phi = 1/x^2            CG
    geodesic-(half)nbhd log-polar (s, theta)  phi = 1/cos^2(theta)   CG
    ideal-nbhd          log-polar (s, theta)  phi = 1/cos^2(theta)   CG
    hyperbola-*         conformal strip       phi = c^2 k^2 |map'|^2 CG

Substituting s = log r turns the polar Laplacians flat and makes annulus,
sector, and tube boundaries grid-aligned, so those solves use an exact
five-point stencil (symmetric positive definite, solved by conjugate
gradients). The hyperbola interiors pull back through z = c*cosh(k*zeta)
(convex branch) or z = c*sinh(k*zeta) (region between branches) with
k = 2*mu/pi, mapping a straight strip rectangle onto the domain truncated
by confocal ellipse arcs. Domains with genuinely curved boundaries in
their grid chart (ellipse, parabola, hyperbolic disk) use Shortley-Weller
shortened stencil legs at boundary-adjacent nodes and red-black SOR.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .charts import Chart, Point2, convert
from .closed_form import exhaustion_ellipse
from .domains import (
    AngularSector,
    Annulus,
    Domain,
    Ellipse,
    GeodesicHalfNbhd,
    GeodesicNbhd,
    Horodisk,
    HyperbolaConcave,
    HyperbolaConvex,
    HyperbolicDisk,
    IdealNbhd,
    Parabola,
    contains,
    OutsideDomainError,
    contains_xy,
    format_domain,
    kind_name,
)

__all__ = [
    "GridSolution",
    "SolverConvergenceError",
    "TruncationRequiredError",
    "grid_chart",
    "solve_grid",
    "exhaustion_run",
]

SOR_OMEGA = 1.9
MAX_SOR_SWEEPS = 1_000_000
MAX_CG_ITERS = 1_000_000
TARGET_RESIDUAL = 1e-10
# fraction of h below which a stencil leg collapses and the node is pinned
# to the boundary value instead (perturbation <= floor * h * |grad f|)
LEG_FLOOR = 1e-3

MASK_EXTERIOR = 0
MASK_INTERIOR = 1
MASK_BOUNDARY_ADJ = 2


class TruncationRequiredError(ValueError):
    """Unbounded domain solved without a truncation box."""


class SolverConvergenceError(RuntimeError):
    """Iterative solver missed the residual target within the iteration cap."""


def grid_chart(domain: Domain) -> str:
    """Name of the coordinate system the grid for this domain lives in."""
    if isinstance(domain, (Ellipse, Parabola)):
        return "euclidean"
    if isinstance(domain, (Annulus, AngularSector)):
        return "log-polar"
    if isinstance(domain, HyperbolicDisk):
        return "unit-disk"
    if isinstance(domain, Horodisk):
        return "half-plane"
    if isinstance(domain, (GeodesicNbhd, GeodesicHalfNbhd, IdealNbhd)):
        return "log-polar-half-plane"
    if isinstance(domain, (HyperbolaConvex, HyperbolaConcave)):
        return "hyperbola-strip"
    raise TypeError(f"no grid chart for {type(domain).__name__}")


def to_grid_coords(domain: Domain, pt: Point2) -> tuple[float, float]:
    """Map a point to the coordinates of the domain's grid chart."""
    label = grid_chart(domain)
    if label == "euclidean":
        p = convert(pt, Chart.EUCLIDEAN)
        return p.u, p.v
    if label == "unit-disk":
        p = convert(pt, Chart.UNIT_DISK)
        return p.u, p.v
    if label == "half-plane":
        p = convert(pt, Chart.HALF_PLANE)
        return p.u, p.v
    if label == "log-polar":
        p = convert(pt, Chart.EUCLIDEAN)
        r = math.hypot(p.u, p.v)
        if r <= 0:
            raise ValueError("origin has no log-polar image")
        theta = math.atan2(p.v, p.u)
        if isinstance(domain, Annulus):
            theta %= 2.0 * math.pi
        return math.log(r), theta
    if label == "log-polar-half-plane":
        p = convert(pt, Chart.HALF_PLANE_POLAR)
        return math.log(p.u), p.v
    # hyperbola strip: invert the conformal strip parametrization
    z = complex(*astuple_euclidean(pt))
    k = 2.0 * domain.mu / math.pi
    if isinstance(domain, HyperbolaConvex):
        zeta = np.arccosh(z / domain.c + 0j) / k
    else:
        zeta = np.arcsinh(z / domain.c + 0j) / k
    return float(zeta.real), float(zeta.imag)


def astuple_euclidean(pt: Point2) -> tuple[float, float]:
    p = convert(pt, Chart.EUCLIDEAN)
    return p.u, p.v


@dataclass
class GridSolution:
    """Masked lattice of mean-exit-time values.

    ``mask`` codes: 0 exterior (value pinned to 0), 1 interior with a full
    five-point stencil, 2 interior with at least one shortened or
    edge-touching leg. ``values[iu, iv]`` sits at
    ``(bbox[0] + iu*hu, bbox[2] + iv*hv)``. For ``periodic_v`` grids the v
    axis wraps and ``bbox[3]`` is the wrap period end, one step past the
    last node row.
    """

    domain: Domain
    grid_coords: str
    h: float
    bbox: tuple[float, float, float, float]
    hu: float
    hv: float
    mask: np.ndarray
    values: np.ndarray
    residual: float
    periodic_v: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def node_coords(self) -> tuple[np.ndarray, np.ndarray]:
        nu, nv = self.values.shape
        u = self.bbox[0] + self.hu * np.arange(nu)
        v = self.bbox[2] + self.hv * np.arange(nv)
        return u, v

    def value_at_grid(self, gu: float, gv: float) -> float:
        """Bilinear interpolation at grid-chart coordinates."""
        nu, nv = self.values.shape
        fu = (gu - self.bbox[0]) / self.hu
        iu = min(max(int(math.floor(fu)), 0), nu - 2)
        du = fu - iu
        fv = (gv - self.bbox[2]) / self.hv
        if self.periodic_v:
            iv = int(math.floor(fv))
            dv = fv - iv
            j0, j1 = iv % nv, (iv + 1) % nv
        else:
            iv = min(max(int(math.floor(fv)), 0), nv - 2)
            dv = fv - iv
            j0, j1 = iv, iv + 1
        vals = self.values
        return float(
            (1 - du) * (1 - dv) * vals[iu, j0]
            + du * (1 - dv) * vals[iu + 1, j0]
            + (1 - du) * dv * vals[iu, j1]
            + du * dv * vals[iu + 1, j1]
        )

    def value_at(self, pt: Point2) -> float:
        gu, gv = to_grid_coords(self.domain, pt)
        return self.value_at_grid(gu, gv)

    def nearest_node(self, pt: Point2) -> tuple[float, float, float]:
        """(u, v, value) of the grid node closest to pt in the grid chart."""
        gu, gv = to_grid_coords(self.domain, pt)
        nu, nv = self.values.shape
        iu = min(max(int(round((gu - self.bbox[0]) / self.hu)), 0), nu - 1)
        fv = (gv - self.bbox[2]) / self.hv
        if self.periodic_v:
            iv = int(round(fv)) % nv
        else:
            iv = min(max(int(round(fv)), 0), nv - 1)
        u, v = self.node_coords()
        return float(u[iu]), float(v[iv]), float(self.values[iu, iv])

    def write(self, prefix: str) -> tuple[str, str]:
        """Write PREFIX.csv (interior nodes) and PREFIX.json (metadata)."""
        csv_path = f"{prefix}.csv"
        json_path = f"{prefix}.json"
        u, v = self.node_coords()
        iu, iv = np.nonzero(self.mask)
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write("u,v,value\n")
            for i, j in zip(iu, iv):
                fh.write(f"{u[i]:.12g},{v[j]:.12g},{self.values[i, j]:.12g}\n")
        sidecar = {
            "bbox": list(self.bbox),
            "chart": self.grid_coords,
            "domain": format_domain(self.domain),
            "h": self.h,
            "residual": self.residual,
        }
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, sort_keys=True, indent=1)
            fh.write("\n")
        return csv_path, json_path


# ---------------------------------------------------------------------------
# Shortley-Weller masked solver (curved boundaries, red-black SOR)


def _bisect_boundary(inside_fn, px, py, qx, qy, iters=44):
    """Crossing fraction t in (0, 1] along segments p (inside) -> q (outside)."""
    lo = np.zeros_like(px)
    hi = np.ones_like(px)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ins = inside_fn(px + mid * (qx - px), py + mid * (qy - py))
        lo = np.where(ins, mid, lo)
        hi = np.where(ins, hi, mid)
    return 0.5 * (lo + hi)


def _sor_solve(coef, b, interior):
    """Red-black SOR for the assembled stencil; returns values and residual."""
    aW, aE, aS, aN, aP = coef
    f = np.zeros_like(b)
    ii, jj = np.indices(b.shape)
    red = interior & ((ii + jj) % 2 == 0)
    black = interior & ~red
    aP_safe = np.where(interior, aP, 1.0)
    bnorm = float(np.linalg.norm(b[interior]))
    if bnorm == 0.0:
        return f, 0.0

    def gauss(color, f):
        num = (
            b
            + aW * np.roll(f, 1, axis=0)
            + aE * np.roll(f, -1, axis=0)
            + aS * np.roll(f, 1, axis=1)
            + aN * np.roll(f, -1, axis=1)
        )
        return np.where(color, (1.0 - SOR_OMEGA) * f + SOR_OMEGA * num / aP_safe, f), num

    for sweep in range(1, MAX_SOR_SWEEPS + 1):
        f, _ = gauss(red, f)
        f, num = gauss(black, f)
        if sweep % 128 == 0 or sweep == 1:
            r = float(np.linalg.norm((num - aP * f)[interior]))
            if r <= TARGET_RESIDUAL * bnorm:
                return f, r / bnorm
    raise SolverConvergenceError(
        f"SOR did not reach relative residual {TARGET_RESIDUAL:g} "
        f"within {MAX_SOR_SWEEPS} sweeps"
    )


def _solve_sw(domain, chart, h, bbox, box, source_fn, label):
    u0, u1, v0, v1 = bbox
    nu = int(math.ceil((u1 - u0) / h - 1e-9)) + 1
    nv = int(math.ceil((v1 - v0) / h - 1e-9)) + 1
    if nu < 3 or nv < 3:
        raise ValueError("bbox too small for the requested step")
    u = u0 + h * np.arange(nu)
    v = v0 + h * np.arange(nv)
    X, Y = np.meshgrid(u, v, indexing="ij")

    def inside_fn(x, y):
        ok = contains_xy(domain, x, y, chart)
        if box is not None:
            ok = ok & (x > box[0]) & (x < box[1]) & (y > box[2]) & (y < box[3])
        return ok

    inside = np.asarray(inside_fn(X, Y), dtype=bool)
    inside[0, :] = inside[-1, :] = False
    inside[:, 0] = inside[:, -1] = False
    if not inside.any():
        raise ValueError("no interior nodes: refine h or enlarge the bbox")

    shifts = {"W": (1, 0), "E": (-1, 0), "S": (1, 1), "N": (-1, 1)}
    legs = {}
    for key, (shift, axis) in shifts.items():
        leg = np.full((nu, nv), h)
        nb_inside = np.roll(inside, shift, axis=axis)
        cut = inside & ~nb_inside
        if cut.any():
            px, py = X[cut], Y[cut]
            du = -shift * h if axis == 0 else 0.0
            dv = -shift * h if axis == 1 else 0.0
            t = _bisect_boundary(inside_fn, px, py, px + du, py + dv)
            leg[cut] = t * h
        legs[key] = leg

    minleg = np.minimum(
        np.minimum(legs["W"], legs["E"]), np.minimum(legs["S"], legs["N"])
    )
    snapped = inside & (minleg < LEG_FLOOR * h)
    inside &= ~snapped

    hW, hE, hS, hN = legs["W"], legs["E"], legs["S"], legs["N"]
    with np.errstate(divide="ignore", invalid="ignore"):
        aW = np.where(inside, 2.0 / (hW * (hW + hE)), 0.0)
        aE = np.where(inside, 2.0 / (hE * (hW + hE)), 0.0)
        aS = np.where(inside, 2.0 / (hS * (hS + hN)), 0.0)
        aN = np.where(inside, 2.0 / (hN * (hS + hN)), 0.0)
        b = np.where(inside, source_fn(X, Y), 0.0)
    aP = aW + aE + aS + aN

    values, residual = _sor_solve((aW, aE, aS, aN, aP), b, inside)
    values = np.where(inside, values, 0.0)

    full_leg = (
        np.roll(inside, 1, 0)
        & np.roll(inside, -1, 0)
        & np.roll(inside, 1, 1)
        & np.roll(inside, -1, 1)
        & (minleg >= h)
    )
    mask = np.where(
        inside, np.where(full_leg, MASK_INTERIOR, MASK_BOUNDARY_ADJ), MASK_EXTERIOR
    ).astype(np.int8)

    return GridSolution(
        domain=domain,
        grid_coords=label,
        h=h,
        bbox=(u0, u0 + (nu - 1) * h, v0, v0 + (nv - 1) * h),
        hu=h,
        hv=h,
        mask=mask,
        values=values,
        residual=residual,
    )


# ---------------------------------------------------------------------------
# Grid-aligned rectangle solver (five-point stencil, conjugate gradients)


def _tridiag(m, step):
    if m == 1:
        return sp.csr_matrix(np.array([[2.0]])) / step**2
    main = np.full(m, 2.0)
    off = np.full(m - 1, -1.0)
    return sp.diags([off, main, off], [-1, 0, 1]) / step**2


def _circulant(m, step):
    mat = sp.lil_matrix((m, m))
    mat.setdiag(2.0)
    mat.setdiag(-1.0, 1)
    mat.setdiag(-1.0, -1)
    mat[0, m - 1] -= 1.0
    mat[m - 1, 0] -= 1.0
    return (mat / step**2).tocsr()


def _run_cg(A, b):
    try:
        x, info = cg(A, b, rtol=1e-12, atol=0.0, maxiter=MAX_CG_ITERS)
    except TypeError:  # older scipy spells the tolerance differently
        x, info = cg(A, b, tol=1e-12, atol=0.0, maxiter=MAX_CG_ITERS)
    if info != 0:
        raise SolverConvergenceError(f"conjugate gradients returned info={info}")
    return x


def _solve_rect(domain, label, h, u_range, v_range, source_fn, periodic_v=False):
    u0, u1 = u_range
    v0, v1 = v_range
    if not (u1 > u0 and v1 > v0):
        raise ValueError(f"degenerate grid box ({u0}, {u1}, {v0}, {v1})")
    nu = max(3, int(round((u1 - u0) / h)) + 1)
    hu = (u1 - u0) / (nu - 1)
    if periodic_v:
        nv = max(8, int(round((v1 - v0) / h)))
        hv = (v1 - v0) / nv
        v = v0 + hv * np.arange(nv)
        inner_v = slice(0, nv)
        mv = nv
    else:
        nv = max(3, int(round((v1 - v0) / h)) + 1)
        hv = (v1 - v0) / (nv - 1)
        v = v0 + hv * np.arange(nv)
        inner_v = slice(1, nv - 1)
        mv = nv - 2
    u = u0 + hu * np.arange(nu)
    mu = nu - 2

    X, Y = np.meshgrid(u, v, indexing="ij")
    source = np.asarray(source_fn(X, Y), dtype=float)

    Tu = _tridiag(mu, hu)
    Tv = _circulant(mv, hv) if periodic_v else _tridiag(mv, hv)
    A = (sp.kron(Tu, sp.identity(mv)) + sp.kron(sp.identity(mu), Tv)).tocsr()
    b = source[1 : nu - 1, inner_v].ravel()

    x = _run_cg(A, b)
    bnorm = float(np.linalg.norm(b))
    residual = float(np.linalg.norm(b - A @ x)) / bnorm if bnorm else 0.0
    if residual > TARGET_RESIDUAL:
        raise SolverConvergenceError(
            f"CG stalled at relative residual {residual:.3e}"
        )

    values = np.zeros((nu, nv))
    values[1 : nu - 1, inner_v] = x.reshape(mu, mv)

    mask = np.zeros((nu, nv), dtype=np.int8)
    mask[1 : nu - 1, inner_v] = MASK_INTERIOR
    mask[1, inner_v] = MASK_BOUNDARY_ADJ
    mask[nu - 2, inner_v] = MASK_BOUNDARY_ADJ
    if not periodic_v:
        mask[1 : nu - 1, 1] = MASK_BOUNDARY_ADJ
        mask[1 : nu - 1, nv - 2] = MASK_BOUNDARY_ADJ

    bbox = (u0, u1, v0, v1) if periodic_v else (u0, u0 + (nu - 1) * hu, v0, v0 + (nv - 1) * hv)
    return GridSolution(
        domain=domain,
        grid_coords=label,
        h=h,
        bbox=bbox,
        hu=hu,
        hv=hv,
        mask=mask,
        values=values,
        residual=residual,
        periodic_v=periodic_v,
    )


# ---------------------------------------------------------------------------
# Per-kind dispatch


def _need_truncation(domain, truncation):
    if truncation is None:
        raise TruncationRequiredError(
            f"{kind_name(domain)} is unbounded: pass truncation=(umin, umax, "
            f"vmin, vmax) in its grid chart ({grid_chart(domain)})"
        )
    t = tuple(float(x) for x in truncation)
    if len(t) != 4 or not all(map(math.isfinite, t)) or t[0] >= t[1] or t[2] >= t[3]:
        raise ValueError(f"bad truncation box {truncation!r}")
    return t


def solve_grid(domain: Domain, h: float, bbox=None, truncation=None) -> GridSolution:
    """Solve the mean-exit-time Poisson problem on a grid.

    ``bbox`` (optional) and ``truncation`` (required for unbounded domains)
    are 4-tuples (umin, umax, vmin, vmax) in the domain's grid chart; see
    grid_chart / to_grid_coords. Artificial truncation edges carry value 0,
    so truncated results are lower bounds of the full-domain exit time.
    """
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")

    if isinstance(domain, Ellipse):
        ka = math.ceil(domain.a / h) + 2
        kb = math.ceil(domain.b / h) + 2
        default = (domain.h - ka * h, domain.h + ka * h, domain.k - kb * h, domain.k + kb * h)
        use = tuple(map(float, bbox)) if bbox is not None else default
        if (
            use[0] > domain.h - domain.a - h
            or use[1] < domain.h + domain.a + h
            or use[2] > domain.k - domain.b - h
            or use[3] < domain.k + domain.b + h
        ):
            raise ValueError(f"bbox {use} does not cover the domain plus one step")
        box = tuple(float(x) for x in truncation) if truncation is not None else None
        return _solve_sw(
            domain, Chart.EUCLIDEAN, h, use, box, lambda X, Y: np.ones_like(X), "euclidean"
        )

    if isinstance(domain, Parabola):
        t = _need_truncation(domain, truncation)
        default = (t[0] - 2 * h, t[1] + 2 * h, t[2] - 2 * h, t[3] + 2 * h)
        use = tuple(map(float, bbox)) if bbox is not None else default
        if use[0] > t[0] - h or use[1] < t[1] + h or use[2] > t[2] - h or use[3] < t[3] + h:
            raise ValueError(f"bbox {use} does not cover the truncation box plus one step")
        return _solve_sw(
            domain, Chart.EUCLIDEAN, h, use, t, lambda X, Y: np.ones_like(X), "euclidean"
        )

    if isinstance(domain, HyperbolicDisk):
        rho = math.tanh(domain.R / 2.0)
        kk = math.ceil(rho / h) + 2
        default = (-kk * h, kk * h, -kk * h, kk * h)
        use = tuple(map(float, bbox)) if bbox is not None else default
        if use[0] > -rho - h or use[1] < rho + h or use[2] > -rho - h or use[3] < rho + h:
            raise ValueError(f"bbox {use} does not cover the domain plus one step")

        def src(X, Y):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return 4.0 / (1.0 - X * X - Y * Y) ** 2

        box = tuple(float(x) for x in truncation) if truncation is not None else None
        return _solve_sw(domain, Chart.UNIT_DISK, h, use, box, src, "unit-disk")

    if isinstance(domain, Annulus):
        u_range = (math.log(domain.a), math.log(domain.b))
        return _solve_rect(
            domain,
            "log-polar",
            h,
            u_range,
            (0.0, 2.0 * math.pi),
            lambda X, Y: np.exp(2.0 * X),
            periodic_v=True,
        )

    if isinstance(domain, AngularSector):
        t = _need_truncation(domain, truncation)
        half = domain.alpha / 2.0
        v0, v1 = max(t[2], -half), min(t[3], half)
        return _solve_rect(
            domain, "log-polar", h, (t[0], t[1]), (v0, v1), lambda X, Y: np.exp(2.0 * X)
        )

    if isinstance(domain, Horodisk):
        t = _need_truncation(domain, truncation)
        u0 = max(t[0], domain.R)
        return _solve_rect(
            domain, "half-plane", h, (u0, t[1]), (t[2], t[3]), lambda X, Y: 1.0 / X**2
        )

    if isinstance(domain, (GeodesicNbhd, GeodesicHalfNbhd, IdealNbhd)):
        t = _need_truncation(domain, truncation)
        if isinstance(domain, GeodesicNbhd):
            lo, hi = -domain.alpha, domain.alpha
        elif isinstance(domain, GeodesicHalfNbhd):
            lo, hi = 0.0, domain.alpha
        else:
            lo, hi = 0.0, math.pi / 2.0
        v0, v1 = max(t[2], lo), min(t[3], hi)
        if isinstance(domain, IdealNbhd) and v1 >= math.pi / 2.0 - 1e-12:
            raise ValueError(
                "ideal-nbhd truncation must keep theta strictly below pi/2 "
                "(the source 1/cos^2 blows up at the ideal edge)"
            )
        return _solve_rect(
            domain,
            "log-polar-half-plane",
            h,
            (t[0], t[1]),
            (v0, v1),
            lambda X, Y: 1.0 / np.cos(Y) ** 2,
        )

    if isinstance(domain, (HyperbolaConvex, HyperbolaConcave)):
        t = _need_truncation(domain, truncation)
        k = 2.0 * domain.mu / math.pi
        c = domain.c
        v0, v1 = max(t[2], -math.pi / 2.0), min(t[3], math.pi / 2.0)
        if isinstance(domain, HyperbolaConvex):
            src = lambda X, Y: c * c * k * k * (np.sinh(k * X) ** 2 + np.sin(k * Y) ** 2)
        else:
            src = lambda X, Y: c * c * k * k * (np.sinh(k * X) ** 2 + np.cos(k * Y) ** 2)
        return _solve_rect(domain, "hyperbola-strip", h, (t[0], t[1]), (v0, v1), src)

    raise TypeError(f"no grid solver for {type(domain).__name__}")


# ---------------------------------------------------------------------------
# Monotone exhaustion


def _snapped_bbox(default, h, px, py):
    """Shift the default bbox so (px, py) lands exactly on a lattice node."""
    u0 = px - h * math.ceil((px - default[0]) / h + 1e-12)
    v0 = py - h * math.ceil((py - default[2]) / h + 1e-12)
    return (u0, default[1], v0, default[3])


def exhaustion_run(domain: Domain, pt: Point2, sizes, h: float | None = None):
    """Grid exit-time lower bounds for a nested family of truncations.

    ``sizes`` must be increasing; each size selects one truncation in a
    kind-specific way: for the parabola it is the index of the inscribed
    exhaustion ellipse; for the sector, the outer radius; for the horodisk,
    the outer x cap; for tubes and hyperbola regions, the half-extent of
    the grid's axis coordinate (s or strip u). For the ideal-nbhd the polar
    angle ceiling pi/2 - 1/size also grows with the size, since the domain
    is only exhausted when theta approaches pi/2. Returned values are
    nondecreasing up to solver tolerance and bounded by the closed form
    when it is finite.
    """
    sizes = [float(s) for s in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be strictly increasing, got {sizes}")
    if not sizes:
        return []
    if not contains(domain, pt):
        raise OutsideDomainError("probe point is not inside the domain")

    out = []
    if isinstance(domain, Parabola):
        p = convert(pt, Chart.EUCLIDEAN)
        smallest = exhaustion_ellipse(domain.p, sizes[0])
        if not contains(smallest, p):
            raise ValueError("probe point lies outside the smallest truncation")
        for n in sizes:
            sub = exhaustion_ellipse(domain.p, n)
            hh = h if h is not None else max(0.02, n / 100.0)
            ka = math.ceil(sub.a / hh) + 2
            kb = math.ceil(sub.b / hh) + 2
            default = (sub.h - ka * hh, sub.h + ka * hh, sub.k - kb * hh, sub.k + kb * hh)
            sol = solve_grid(sub, hh, bbox=_snapped_bbox(default, hh, p.u, p.v))
            out.append(sol.value_at(p))
        return out

    gu, gv = to_grid_coords(domain, pt)
    if isinstance(domain, AngularSector):
        s0 = min(-3.0, gu - 1.0)
        if math.log(sizes[0]) <= gu:
            raise ValueError("probe point lies outside the smallest truncation")
        half = domain.alpha / 2.0
        boxes = [(s0, math.log(s), -half, half) for s in sizes]
        hh = h if h is not None else 0.02
    elif isinstance(domain, Horodisk):
        if sizes[0] <= gu:
            raise ValueError("probe point lies outside the smallest truncation")
        boxes = [
            (domain.R, s, gv - (s - domain.R), gv + (s - domain.R)) for s in sizes
        ]
        hh = h if h is not None else 0.05
    elif isinstance(domain, (GeodesicNbhd, GeodesicHalfNbhd)):
        if abs(gu) >= sizes[0]:
            raise ValueError("probe point lies outside the smallest truncation")
        lo = -domain.alpha if isinstance(domain, GeodesicNbhd) else 0.0
        boxes = [(-s, s, lo, domain.alpha) for s in sizes]
        hh = h if h is not None else 0.02
    elif isinstance(domain, IdealNbhd):
        if abs(gu) >= sizes[0] or gv >= math.pi / 2.0 - 1.0 / sizes[0]:
            raise ValueError("probe point lies outside the smallest truncation")
        boxes = [(-s, s, 0.0, math.pi / 2.0 - 1.0 / s) for s in sizes]
        hh = h if h is not None else 0.02
    elif isinstance(domain, (HyperbolaConvex, HyperbolaConcave)):
        if abs(gu) >= sizes[0]:
            raise ValueError("probe point lies outside the smallest truncation")
        boxes = [(-s, s, -math.pi / 2.0, math.pi / 2.0) for s in sizes]
        hh = h if h is not None else math.pi / 105.0
    else:
        raise ValueError(
            f"{kind_name(domain)} is bounded: exhaustion_run needs an unbounded domain"
        )

    for box in boxes:
        sol = solve_grid(domain, hh, truncation=box)
        out.append(sol.value_at_grid(gu, gv))
    return out
