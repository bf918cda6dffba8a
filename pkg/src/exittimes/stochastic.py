"""Monte Carlo estimators of mean exit times.

Two estimators target Brownian motion whose generator is the metric
Laplacian (twice the usual convention, so the unit-disk center value is
1/4):

* Euler stepping in a conformal Cartesian chart. With conformal factor phi,
  each coordinate gains sqrt(2*dt/phi(pos)) times a standard normal per
  step. The chart segment that first leaves the domain is bisected and the
  crossing time linearly interpolated. Paths reaching ``t_max`` are censored
  there, so with censoring the mean estimates E[min(T, t_max)].

* Walk-on-Spheres: repeatedly jump to a uniformly random point of the metric
  circle whose radius rho is the boundary-distance lower bound, accumulating
  the circle center's mean exit value per jump (rho^2/4 in the Euclidean
  plane, 2*log(cosh(rho/2)) in the hyperbolic plane), until rho < wos_eps.

Reproducibility: path i consumes a counter-based random stream keyed by
(seed, i) only, and per-path results land in a fixed-shape array reduced
with a single numpy sum, so estimates are bit-identical across repeat runs
and across worker counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .charts import Chart, ChartError, Point2, convert
from .domains import (
    Domain,
    OutsideDomainError,
    boundary_distance_lb_xy,
    contains,
    contains_xy,
    format_domain,
    is_euclidean,
)

__all__ = [
    "MCConfig",
    "MCEstimate",
    "path_rng",
    "simulate_exit",
    "euclidean_ball_value",
    "hyperbolic_ball_value",
]

_MASK64 = (1 << 64) - 1
MAX_WOS_JUMPS = 1_000_000


@dataclass(frozen=True)
class MCConfig:
    """Simulation budget. Engine tiling knobs never change the estimates."""

    paths: int
    dt: float = 1e-4
    seed: int = 0
    t_max: float = 100.0
    method: str = "euler"  # "euler" or "wos"
    wos_eps: float = 1e-4
    workers: int = 1

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError(f"paths must be >= 1, got {self.paths}")
        if not 0 < self.dt <= 1e-2:
            raise ValueError(f"dt must lie in (0, 1e-2], got {self.dt}")
        if not 0 < self.wos_eps <= 1e-2:
            raise ValueError(f"wos_eps must lie in (0, 1e-2], got {self.wos_eps}")
        if self.t_max <= 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.method not in ("euler", "wos"):
            raise ValueError(f"method must be 'euler' or 'wos', got '{self.method}'")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n: int
    censored_fraction: float


def path_rng(seed: int, path_index: int) -> np.random.Generator:
    """Counter-based stream for one path: a pure function of (seed, index)."""
    return np.random.Generator(
        np.random.Philox(key=[seed & _MASK64, path_index & _MASK64])
    )


def euclidean_ball_value(rho):
    """Mean exit time at the center of a Euclidean disk of radius rho."""
    return rho * rho / 4.0


def hyperbolic_ball_value(rho):
    """Mean exit time at the center of a hyperbolic disk of radius rho.

    Solves the radial equation f'' + coth(r) f' = -1 of the hyperbolic-plane
    Laplacian with f(rho) = 0, giving f(0) = 2 log cosh(rho/2). This keeps
    Walk-on-Spheres consistent with the Euler oracle, which discretizes the
    same operator. (The catalog's disk formula solves the equation with
    radial drift 2 coth r instead; using its center value here would bias
    every hyperbolic walk. See the hyperbolic-disk notes in closed_form.)
    """
    return 2.0 * np.log(np.cosh(rho / 2.0))


# engine tiling; results do not depend on these
_ARENA_ROWS = 2048
_CHUNK = 2048  # buffered draws per path; multiple of _BATCH
_BATCH = 256  # Euler steps advanced per vectorized sweep
_WOS_CHUNK = 256  # walks capture in tens of hops, so keep their buffer small

# Jumps use a slightly shrunk radius so the target is strictly interior even
# when the distance bound is sharp (a full-radius jump from the exact center
# of a ball-like domain would land on the boundary itself and the walk would
# stop without banking that last ball).  Any radius below the true distance
# keeps the walk unbiased.
_WOS_SHRINK = 0.99


def _sim_chart(domain: Domain, chart: Chart | None) -> Chart:
    if chart is None:
        return Chart.EUCLIDEAN if is_euclidean(domain) else Chart.HALF_PLANE
    if is_euclidean(domain):
        if chart is not Chart.EUCLIDEAN:
            raise ChartError(
                f"Euclidean domains simulate in the euclidean chart, got {chart.value}"
            )
    elif chart not in (Chart.HALF_PLANE, Chart.UNIT_DISK):
        raise ChartError(
            "hyperbolic domains simulate in the half-plane or unit-disk chart, "
            f"got {chart.value}"
        )
    return chart


class _PendingExits:
    """Chart segments that left the domain, bisected in one deferred pass."""

    def __init__(self):
        self.ax, self.ay, self.bx, self.by, self.t0, self.idx = [], [], [], [], [], []

    def add(self, ax, ay, bx, by, t0, idx):
        if len(idx):
            self.ax.append(ax)
            self.ay.append(ay)
            self.bx.append(bx)
            self.by.append(by)
            self.t0.append(t0)
            self.idx.append(idx)

    def resolve(self, domain, chart, dt, t_max, times, censored):
        if not self.idx:
            return
        ax = np.concatenate(self.ax)
        ay = np.concatenate(self.ay)
        bx = np.concatenate(self.bx)
        by = np.concatenate(self.by)
        t0 = np.concatenate(self.t0)
        idx = np.concatenate(self.idx)
        lo = np.zeros_like(ax)
        hi = np.ones_like(ax)
        for _ in range(46):
            mid = 0.5 * (lo + hi)
            mx = ax + mid * (bx - ax)
            my = ay + mid * (by - ay)
            ins = contains_xy(domain, mx, my, chart)
            lo = np.where(ins, mid, lo)
            hi = np.where(ins, hi, mid)
        t_exit = t0 + 0.5 * (lo + hi) * dt
        over = t_exit >= t_max
        times[idx] = np.where(over, t_max, t_exit)
        censored[idx] |= over


def _euler_batch(chart, x, y, xi, eta, sdt):
    """Positions after each of the next k steps; exact Euler iterates.

    Positions past a path's first exit are still computed (and may blow up
    or go non-finite); exit detection only reads columns up to the first
    outside one, and the membership test rejects non-finite points.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        if chart is Chart.EUCLIDEAN:
            bx = x[:, None] + sdt * np.cumsum(xi, axis=1)
            by = y[:, None] + sdt * np.cumsum(eta, axis=1)
            return bx, by
        if chart is Chart.HALF_PLANE:
            # x multiplies its own increments, so the batch is a cumulative
            # product; y increments use the pre-step x.
            fac = np.cumprod(1.0 + sdt * xi, axis=1)
            bx = x[:, None] * fac
            xprev = np.concatenate([x[:, None], bx[:, :-1]], axis=1)
            by = y[:, None] + sdt * np.cumsum(xprev * eta, axis=1)
            return bx, by
        # unit disk: the step scale couples both coordinates, so walk in k
        # plain steps and record the iterates.
        k = xi.shape[1]
        bx = np.empty_like(xi)
        by = np.empty_like(eta)
        cx, cy = x.copy(), y.copy()
        for j in range(k):
            s = 0.5 * sdt * (1.0 - cx * cx - cy * cy)
            cx = cx + s * xi[:, j]
            cy = cy + s * eta[:, j]
            bx[:, j] = cx
            by[:, j] = cy
        return bx, by


def _euler_range(domain, chart, start_xy, cfg, lo, hi, times, censored):
    """Run paths lo..hi-1 through a fixed-capacity arena of row slots."""
    sdt = math.sqrt(2.0 * cfg.dt)
    k, chunk = _BATCH, _CHUNK
    x0, y0 = start_xy
    queue = iter(range(lo, hi))
    pending = _PendingExits()

    x = np.empty(0)
    y = np.empty(0)
    t = np.empty(0)
    idx = np.empty(0, dtype=np.int64)
    alive = np.empty(0, dtype=bool)
    gens: list = []
    buf = np.empty((0, chunk, 2))
    cursor = 0
    exhausted = False

    while True:
        if cursor == 0:
            # chunk boundary: drop finished rows, admit new paths, refill
            keep = np.flatnonzero(alive)
            if len(keep) < len(alive):
                x, y, t, idx = x[keep], y[keep], t[keep], idx[keep]
                buf = buf[keep]
                gens = [gens[j] for j in keep]
                alive = alive[keep]
            new_ids = []
            if not exhausted:
                while len(gens) + len(new_ids) < _ARENA_ROWS:
                    nxt = next(queue, None)
                    if nxt is None:
                        exhausted = True
                        break
                    new_ids.append(nxt)
            for j, g in enumerate(gens):
                buf[j] = g.standard_normal((chunk, 2))
            if new_ids:
                x = np.concatenate([x, np.full(len(new_ids), x0)])
                y = np.concatenate([y, np.full(len(new_ids), y0)])
                t = np.concatenate([t, np.zeros(len(new_ids))])
                idx = np.concatenate([idx, np.asarray(new_ids, dtype=np.int64)])
                alive = np.concatenate([alive, np.ones(len(new_ids), dtype=bool)])
                fresh = np.empty((len(new_ids), chunk, 2))
                for j, i in enumerate(new_ids):
                    g = path_rng(cfg.seed, i)
                    gens.append(g)
                    fresh[j] = g.standard_normal((chunk, 2))
                buf = np.concatenate([buf, fresh]) if len(buf) else fresh
            if not len(gens):
                break

        xi = buf[:, cursor : cursor + k, 0]
        eta = buf[:, cursor : cursor + k, 1]
        bx, by = _euler_batch(chart, x, y, xi, eta, sdt)
        inside = contains_xy(domain, bx, by, chart)
        out = ~inside
        has_exit = out.any(axis=1)
        jexit = np.argmax(out, axis=1)  # first outside column when has_exit

        # per-row number of whole steps allowed before the censor cap
        jcap = np.ceil((cfg.t_max - t) / cfg.dt - 1e-12)
        valid_exit = alive & has_exit & (jexit + 1 <= jcap)
        cens_now = alive & ~valid_exit & (jcap <= k)

        if np.any(valid_exit):
            rows = np.flatnonzero(valid_exit)
            je = jexit[rows]
            gx = np.take_along_axis(bx[rows], je[:, None], axis=1)[:, 0]
            gy = np.take_along_axis(by[rows], je[:, None], axis=1)[:, 0]
            pxp = np.take_along_axis(bx[rows], np.maximum(je - 1, 0)[:, None], axis=1)[:, 0]
            pyp = np.take_along_axis(by[rows], np.maximum(je - 1, 0)[:, None], axis=1)[:, 0]
            first = je == 0
            pxp = np.where(first, x[rows], pxp)
            pyp = np.where(first, y[rows], pyp)
            pending.add(pxp, pyp, gx, gy, t[rows] + je * cfg.dt, idx[rows])
        if np.any(cens_now):
            rows = idx[cens_now]
            times[rows] = cfg.t_max
            censored[rows] = True

        alive = alive & ~valid_exit & ~cens_now
        x = bx[:, -1].copy()
        y = by[:, -1].copy()
        t = t + k * cfg.dt
        cursor = (cursor + k) % chunk
        if not np.any(alive) and exhausted:
            break
        if not np.any(alive):
            cursor = 0  # nothing to carry over; wrap early to admit more work

    pending.resolve(domain, chart, cfg.dt, cfg.t_max, times, censored)


def _wos_jump(chart, x, y, rho, psi):
    """Uniform point on the metric circle of radius rho around (x, y)."""
    if chart is Chart.EUCLIDEAN:
        return x + rho * np.cos(psi), y + rho * np.sin(psi)
    w = np.tanh(rho / 2.0) * np.exp(1j * psi)
    if chart is Chart.HALF_PLANE:
        z1 = (1.0 + w) / (1.0 - w)  # disk point moved to base (1, 0)
        return x * z1.real, x * z1.imag + y
    # unit disk: automorphism sending 0 to the current point
    w0 = x + 1j * y
    q = (w0 + w) / (1.0 + np.conj(w0) * w)
    return q.real, q.imag


def _wos_range(domain, chart, start_xy, cfg, lo, hi, times, censored):
    eps = cfg.wos_eps
    ball = euclidean_ball_value if is_euclidean(domain) else hyperbolic_ball_value
    chunk = _WOS_CHUNK
    x0, y0 = start_xy
    queue = iter(range(lo, hi))

    x = np.empty(0)
    y = np.empty(0)
    acc = np.empty(0)
    hops = np.empty(0, dtype=np.int64)
    idx = np.empty(0, dtype=np.int64)
    alive = np.empty(0, dtype=bool)
    gens: list = []
    buf = np.empty((0, chunk))
    cursor = 0
    exhausted = False

    while True:
        if cursor == 0:
            keep = np.flatnonzero(alive)
            if len(keep) < len(alive):
                x, y, acc, hops, idx = x[keep], y[keep], acc[keep], hops[keep], idx[keep]
                buf = buf[keep]
                gens = [gens[j] for j in keep]
                alive = alive[keep]
            new_ids = []
            if not exhausted:
                while len(gens) + len(new_ids) < _ARENA_ROWS:
                    nxt = next(queue, None)
                    if nxt is None:
                        exhausted = True
                        break
                    new_ids.append(nxt)
            for j, g in enumerate(gens):
                buf[j] = g.random(chunk)
            if new_ids:
                x = np.concatenate([x, np.full(len(new_ids), x0)])
                y = np.concatenate([y, np.full(len(new_ids), y0)])
                acc = np.concatenate([acc, np.zeros(len(new_ids))])
                hops = np.concatenate([hops, np.zeros(len(new_ids), dtype=np.int64)])
                idx = np.concatenate([idx, np.asarray(new_ids, dtype=np.int64)])
                alive = np.concatenate([alive, np.ones(len(new_ids), dtype=bool)])
                fresh = np.empty((len(new_ids), chunk))
                for j, i in enumerate(new_ids):
                    g = path_rng(cfg.seed, i)
                    gens.append(g)
                    fresh[j] = g.random(chunk)
                buf = np.concatenate([buf, fresh]) if len(buf) else fresh
            if not len(gens):
                break

        with np.errstate(invalid="ignore"):
            rho = np.asarray(boundary_distance_lb_xy(domain, x, y, chart))
        done = alive & (rho < eps)
        capped = alive & (hops >= MAX_WOS_JUMPS)
        if np.any(done | capped):
            rows = np.flatnonzero(done | capped)
            times[idx[rows]] = acc[rows]
            censored[idx[rows]] |= capped[rows]
            alive[rows] = False

        if np.any(alive):
            psi = 2.0 * math.pi * buf[:, cursor]
            jr = _WOS_SHRINK * np.where(alive, rho, 0.0)
            jx, jy = _wos_jump(chart, x, y, jr, psi)
            # the shrunk radius keeps jumps strictly inside; treat any
            # numerical escape as an exit right after crossing that ball
            ok = contains_xy(domain, jx, jy, chart)
            landed = alive & ok
            escaped = alive & ~ok
            gain = ball(np.where(alive, jr, 1.0))
            acc = np.where(landed, acc + gain, acc)
            x = np.where(landed, jx, x)
            y = np.where(landed, jy, y)
            hops = hops + landed
            if np.any(escaped):
                rows = np.flatnonzero(escaped)
                times[idx[rows]] = acc[rows] + gain[rows]
                alive[rows] = False
        cursor = (cursor + 1) % chunk
        if not np.any(alive):
            if exhausted:
                break
            cursor = 0

    return


def simulate_exit(
    domain: Domain,
    start: Point2,
    cfg: MCConfig,
    chart: Chart | None = None,
) -> MCEstimate:
    """Estimate the expected first exit time from a start point.

    ``chart`` picks the simulation chart for hyperbolic domains (half-plane
    by default, unit-disk optionally); Euclidean domains always step in the
    Euclidean chart. Returns mean, standard error, path count, and the
    fraction of censored paths (Euler: t_max reached, so the mean estimates
    E[min(T, t_max)]; WoS: jump cap reached).
    """
    sim_chart = _sim_chart(domain, chart)
    if not contains(domain, start):
        raise OutsideDomainError(
            f"start point ({start.u}, {start.v}) [{start.chart.value}] is not inside "
            f"{format_domain(domain)}"
        )
    p = convert(start, sim_chart)
    start_xy = (p.u, p.v)

    times = np.zeros(cfg.paths)
    censored = np.zeros(cfg.paths, dtype=bool)
    runner = _euler_range if cfg.method == "euler" else _wos_range

    if cfg.workers == 1:
        runner(domain, sim_chart, start_xy, cfg, 0, cfg.paths, times, censored)
    else:
        bounds = np.linspace(0, cfg.paths, cfg.workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futs = [
                pool.submit(
                    runner, domain, sim_chart, start_xy, cfg, int(a), int(b), times, censored
                )
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            for f in futs:
                f.result()

    n = cfg.paths
    mean = float(np.sum(times) / n)
    if n > 1:
        var = float(np.sum((times - mean) ** 2) / (n - 1))
    else:
        var = 0.0
    return MCEstimate(
        mean=mean,
        stderr=math.sqrt(var / n),
        n=n,
        censored_fraction=float(np.sum(censored)) / n,
    )
