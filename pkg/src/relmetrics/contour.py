"""Planar metric-ball contours by radial bisection.

Along each of K rays from the center the first radius where the metric
reaches the level r is located by bracketing and bisection.  This assumes the
ball is star-shaped about its center along that ray; rays that leave G (or
run to infinity) before reaching the level are marked unbounded.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from . import metrics as M
from .domains import Ball, DomainSpec, HalfSpace, require_member
from .extended_space import ExtendedPoint

BISECTION_TOLERANCE = 1e-10
_HIT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ContourRow:
    theta: float
    x1: float
    x2: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.x1)


def _exit_distance(g: DomainSpec, c: tuple, u: tuple) -> float:
    """Distance along the ray c + s u at which it first meets the boundary."""
    if isinstance(g, Ball):
        w = (c[0] - g.center.coords[0], c[1] - g.center.coords[1])
        bq = w[0] * u[0] + w[1] * u[1]
        cq = w[0] ** 2 + w[1] ** 2 - g.radius ** 2
        return -bq + math.sqrt(bq * bq - cq)
    if isinstance(g, HalfSpace):
        rate = u[0] * g.normal[0] + u[1] * g.normal[1]
        return g.height(ExtendedPoint(c)) / -rate if rate < 0 else math.inf
    hit = math.inf
    for a in g.points:
        if a.is_inf:
            continue
        w = (a.coords[0] - c[0], a.coords[1] - c[1])
        s = w[0] * u[0] + w[1] * u[1]
        if s > 0 and abs(w[0] * u[1] - w[1] * u[0]) <= _HIT_TOLERANCE * max(1.0, s):
            hit = min(hit, s)
    return hit


def _samples(s_exit: float):
    """Increasing radii that approach the exit point (or infinity) geometrically."""
    if math.isfinite(s_exit):
        yield from (s_exit * 2.0 ** -k for k in range(40, 0, -1))
        yield from (s_exit * (1.0 - 2.0 ** -k) for k in range(2, 52))
    else:
        yield from (2.0 ** k for k in range(-30, 200))


def metric_evaluator(metric: str, g: DomainSpec, center: ExtendedPoint, p=None, b=None):
    """s -> d(center, y) as a function of a point y.

    rho on balls and half-spaces uses the hyperbolic closed form, which the
    boundary search reproduces; other metrics call the library directly.
    """
    if metric == "rho" and isinstance(g, (Ball, HalfSpace)):
        return lambda y: M.hyperbolic_closed_form(g, center, y)
    return lambda y: M.compute(metric, g, center, y, p, b).value


def ray_crossing(f, c: tuple, u: tuple, r: float, s_exit: float, tol: float = BISECTION_TOLERANCE):
    """First radius s < s_exit with f(c + s u) >= r, or None."""
    lo, hi = 0.0, None
    for s in _samples(s_exit):
        if s >= s_exit:
            break
        try:
            v = f(ExtendedPoint((c[0] + s * u[0], c[1] + s * u[1])))
        except ValueError:  # rounding pushed the sample onto or past the boundary
            break
        if v >= r:
            hi = s
            break
        lo = s
    if hi is None:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(ExtendedPoint((c[0] + mid * u[0], c[1] + mid * u[1]))) >= r:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def ball_contour(metric: str, g: DomainSpec, center: ExtendedPoint, radius: float, resolution: int,
                 p=None, b=None, tol: float = BISECTION_TOLERANCE) -> list[ContourRow]:
    """``resolution`` points of the level set {y : d(center, y) = radius}, at angles 2 pi k / K."""
    if g.dim != 2:
        raise ValueError("metric-ball contours are planar: the domain must have dimension 2")
    if not radius > 0 or not math.isfinite(radius):
        raise ValueError("radius must be positive")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if center.is_inf:
        raise ValueError("center must be finite")
    require_member(g, center, "center")
    f = metric_evaluator(metric, g, center, p, b)
    f(center)  # surfaces metric-specific precondition errors before the sweep
    c = center.coords
    rows = []
    for k in range(resolution):
        theta = 2.0 * math.pi * k / resolution
        u = (math.cos(theta), math.sin(theta))
        s_exit = _exit_distance(g, c, u)
        s = ray_crossing(f, c, u, radius, s_exit, tol)
        if s is None:
            rows.append(ContourRow(theta, math.inf, math.inf))
        else:
            rows.append(ContourRow(theta, c[0] + s * u[0], c[1] + s * u[1]))
    return rows


def write_contour_csv(rows: list[ContourRow], path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "x1", "x2"])
        for row in rows:
            w.writerow([repr(row.theta), repr(row.x1), repr(row.x2)])


def read_contour_csv(path) -> list[ContourRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [ContourRow(float(r["theta"]), float(r["x1"]), float(r["x2"])) for r in reader]
