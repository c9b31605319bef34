"""Domains of R^n + {inf} described by their boundary, and the supremum engine.

Every metric in this package is a supremum over one boundary point or over
an ordered pair of distinct boundary points.  For finite boundary lists the
supremum is computed exhaustively; for balls and half-spaces it is found by a
grid search over the boundary sphere followed by Nelder-Mead refinement from
the best grid cells (a local method: the result is a lower bound on the true
supremum).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from .extended_space import (
    INF,
    ExtendedPoint,
    check_same_dim,
    chordal_distance,
    chordal_distance_array,
    point_from_json,
    point_to_json,
)

MIN_BOUNDARY_SEPARATION = 1e-12


def _as_point(p) -> ExtendedPoint:
    if isinstance(p, ExtendedPoint):
        return p
    return point_from_json(p)


def _check_separated(pts: Sequence[ExtendedPoint]):
    for i in range(len(pts)):
        for j in range(i):
            if chordal_distance(pts[i], pts[j]) < MIN_BOUNDARY_SEPARATION:
                raise ValueError(f"boundary points {pts[j]} and {pts[i]} are not distinct "
                                 f"(chordal separation < {MIN_BOUNDARY_SEPARATION:g})")


def _normalize_boundary(points, euclidean_subset: bool):
    pts = tuple(_as_point(p) for p in points)
    if sum(p.is_inf for p in pts) > 1:
        raise ValueError("infinity listed more than once")
    if euclidean_subset and INF not in pts:
        pts = pts + (INF,)
    if len(pts) < 2:
        raise ValueError("a domain needs at least two boundary points")
    dim = check_same_dim(*pts)
    if dim is None:
        raise ValueError("boundary needs at least one finite point")
    _check_separated(pts)
    return pts, dim, euclidean_subset or INF in pts


@dataclass(frozen=True)
class FiniteComplement:
    """G = R^n + {inf} minus a finite list of points.

    With ``euclidean_subset`` the point at infinity is added to the boundary
    (so G is a subset of R^n).
    """

    points: tuple[ExtendedPoint, ...]
    euclidean_subset: bool = False

    def __post_init__(self):
        pts, dim, eu = _normalize_boundary(self.points, self.euclidean_subset)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "euclidean_subset", eu)
        object.__setattr__(self, "_dim", dim)

    @property
    def dim(self) -> int:
        return self._dim

    variant = "finite_complement"


@dataclass(frozen=True)
class BoundaryCloud:
    """A finite sample of a boundary, treated as the whole boundary."""

    points: tuple[ExtendedPoint, ...]
    euclidean_subset: bool = False
    approximate: bool = False

    def __post_init__(self):
        pts, dim, eu = _normalize_boundary(self.points, self.euclidean_subset)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "euclidean_subset", eu)
        object.__setattr__(self, "_dim", dim)

    @property
    def dim(self) -> int:
        return self._dim

    variant = "boundary_cloud"


@dataclass(frozen=True)
class Ball:
    center: ExtendedPoint
    radius: float

    def __post_init__(self):
        c = self.center if isinstance(self.center, ExtendedPoint) else ExtendedPoint(tuple(self.center))
        if c.is_inf:
            raise ValueError("ball center must be finite")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.dim

    euclidean_subset = True
    variant = "ball"


@dataclass(frozen=True)
class HalfSpace:
    """{x : <x, normal> > offset} for a unit normal."""

    normal: tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self):
        nu = tuple(float(v) for v in self.normal)
        ExtendedPoint(nu)
        if abs(math.hypot(*nu) - 1.0) > 1e-12:
            raise ValueError("half-space normal must be a unit vector")
        object.__setattr__(self, "normal", nu)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return len(self.normal)

    def height(self, x: ExtendedPoint) -> float:
        return math.fsum(a * b for a, b in zip(x.coords, self.normal)) - self.offset

    euclidean_subset = True
    variant = "half_space"


DomainSpec = Union[FiniteComplement, Ball, HalfSpace, BoundaryCloud]


def upper_half_space(n: int) -> HalfSpace:
    return HalfSpace(tuple([0.0] * (n - 1) + [1.0]), 0.0)


def unit_ball(n: int) -> Ball:
    return Ball(ExtendedPoint((0.0,) * n), 1.0)


def punctured(*points, euclidean_subset: bool = True) -> FiniteComplement:
    """R^n minus the given finite points (infinity is added to the boundary)."""
    return FiniteComplement(tuple(points), euclidean_subset=euclidean_subset)


def is_finite_boundary(g: DomainSpec) -> bool:
    return isinstance(g, (FiniteComplement, BoundaryCloud))


# -- membership and Euclidean distance ---------------------------------------

def contains(g: DomainSpec, x: ExtendedPoint) -> bool:
    if is_finite_boundary(g):
        return x not in g.points
    if x.is_inf:
        return False
    if isinstance(g, Ball):
        return math.dist(x.coords, g.center.coords) < g.radius
    return g.height(x) > 0.0


def on_boundary(g: DomainSpec, x: ExtendedPoint) -> bool:
    if is_finite_boundary(g):
        return x in g.points
    if x.is_inf:
        return isinstance(g, HalfSpace)
    if isinstance(g, Ball):
        return math.dist(x.coords, g.center.coords) == g.radius
    return g.height(x) == 0.0


def require_member(g: DomainSpec, x: ExtendedPoint, name: str = "x"):
    if x.dim is not None and x.dim != g.dim:
        raise ValueError(f"{name} has dimension {x.dim}, domain has dimension {g.dim}")
    if not contains(g, x):
        if on_boundary(g, x):
            raise ValueError(f"{name} is a boundary point")
        raise ValueError(f"{name} is not in G")


def distance_to_boundary(g: DomainSpec, x: ExtendedPoint) -> float:
    """Euclidean distance from x to the finite part of the boundary."""
    if not g.euclidean_subset:
        raise ValueError("distance to boundary needs a domain declared as a subset of R^n")
    if x.is_inf:
        raise ValueError("distance to boundary is undefined at infinity")
    require_member(g, x)
    if is_finite_boundary(g):
        return min(math.dist(x.coords, a.coords) for a in g.points if not a.is_inf)
    if isinstance(g, Ball):
        return g.radius - math.dist(x.coords, g.center.coords)
    return g.height(x)


# -- serialization ------------------------------------------------------------

def domain_to_dict(g: DomainSpec) -> dict:
    if isinstance(g, FiniteComplement):
        return {"variant": g.variant, "points": [point_to_json(p) for p in g.points],
                "euclidean_subset": g.euclidean_subset}
    if isinstance(g, BoundaryCloud):
        return {"variant": g.variant, "points": [point_to_json(p) for p in g.points],
                "euclidean_subset": g.euclidean_subset, "approximate": g.approximate}
    if isinstance(g, Ball):
        return {"variant": g.variant, "center": list(g.center.coords), "radius": g.radius}
    if isinstance(g, HalfSpace):
        return {"variant": g.variant, "normal": list(g.normal), "offset": g.offset}
    raise TypeError(f"not a domain: {g!r}")


def domain_from_dict(d: dict) -> DomainSpec:
    variant = d.get("variant")
    if variant == "finite_complement":
        return FiniteComplement(tuple(d["points"]), bool(d.get("euclidean_subset", False)))
    if variant == "boundary_cloud":
        return BoundaryCloud(tuple(d["points"]), bool(d.get("euclidean_subset", False)),
                             bool(d.get("approximate", False)))
    if variant == "ball":
        return Ball(tuple(d["center"]), d["radius"])
    if variant == "half_space":
        return HalfSpace(tuple(d["normal"]), d.get("offset", 0.0))
    raise ValueError(f"unknown domain variant {variant!r}")


def dumps_domain(g: DomainSpec) -> str:
    return json.dumps(domain_to_dict(g))


def loads_domain(text: str) -> DomainSpec:
    return domain_from_dict(json.loads(text))


def load_domain(path) -> DomainSpec:
    with open(path) as fh:
        return domain_from_dict(json.load(fh))


# -- supremum engine ------------------------------------------------------------

@dataclass(frozen=True)
class SupremumStrategy:
    """How to take a supremum over the boundary.

    ``grid_size`` is the number of boundary samples for single-point suprema
    (default 1024 in 2D, 512**2 in 3D); ``pair_grid_size`` the number of
    samples per factor for pair suprema (default 256 in 2D, 400 in 3D).
    """

    mode: str = "exhaustive"
    grid_size: int | None = None
    pair_grid_size: int | None = None
    refine_tolerance: float = 1e-10
    multistart_count: int = 8

    def __post_init__(self):
        if self.mode not in ("exhaustive", "grid_refine"):
            raise ValueError(f"unknown supremum mode {self.mode!r}")
        if not self.refine_tolerance > 0:
            raise ValueError("refine_tolerance must be positive")
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")


EXHAUSTIVE = SupremumStrategy("exhaustive")
GRID_REFINE = SupremumStrategy("grid_refine")


def default_strategy(g: DomainSpec) -> SupremumStrategy:
    return EXHAUSTIVE if is_finite_boundary(g) else GRID_REFINE


def _resolve(g: DomainSpec, strategy: SupremumStrategy | None) -> SupremumStrategy:
    strategy = strategy or default_strategy(g)
    if strategy.mode == "exhaustive" and not is_finite_boundary(g):
        raise ValueError("exhaustive supremum needs a finite boundary list")
    if strategy.mode == "grid_refine" and is_finite_boundary(g):
        raise ValueError("grid_refine supremum needs a ball or half-space boundary")
    return strategy


@dataclass
class BoundaryObjective:
    """A boundary objective with an optional vectorized form.

    ``scalar`` takes ExtendedPoints.  ``batch`` takes (coords, inf_mask) arrays,
    one pair for a single-point objective and two for a pair objective; pair
    arrays are broadcast against each other.
    """

    scalar: Callable
    batch: Callable | None = None

    def __call__(self, *pts):
        return self.scalar(*pts)


class _SphereChart:
    """Parameterizes the boundary sphere of a ball or half-space.

    The unit sphere S^{n-1} is mapped onto the boundary: a similarity for a
    ball, an inversion (sending the normal direction to infinity) for a
    half-space.  In 2D the parameter is an angle; otherwise a vector in R^n
    normalized onto the sphere.
    """

    def __init__(self, g: DomainSpec):
        self.g = g
        self.n = g.dim
        self.is_half = isinstance(g, HalfSpace)
        if self.is_half:
            self.nu = np.array(g.normal)
        else:
            self.c = np.array(g.center.coords)

    @property
    def n_params(self) -> int:
        return 1 if self.n == 2 else self.n

    def _unit(self, params: np.ndarray) -> np.ndarray:
        if self.n == 2:
            return np.stack([np.cos(params[..., 0]), np.sin(params[..., 0])], axis=-1)
        nrm = np.linalg.norm(params, axis=-1, keepdims=True)
        safe = np.where(nrm == 0.0, 1.0, nrm)
        out = params / safe
        out[..., 0] = np.where(nrm[..., 0] == 0.0, 1.0, out[..., 0])
        return out

    def map_units(self, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if not self.is_half:
            return self.c + self.g.radius * U, np.zeros(U.shape[:-1], dtype=bool)
        diff = U - self.nu
        d2 = np.einsum("...i,...i->...", diff, diff)
        # |u - nu| < 1e-14 lands within chordal distance ~1e-14 of infinity
        inf = d2 < 1e-28
        safe = np.where(inf, 1.0, d2)
        P = self.g.offset * self.nu + self.nu + 2.0 * diff / safe[..., None]
        return np.where(inf[..., None], 0.0, P), inf

    def points(self, params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.map_units(self._unit(params))

    def point(self, params) -> ExtendedPoint:
        """Scalar version of :meth:`points` (plain floats; hot path of the refinement)."""
        if self.n == 2:
            t = float(params[0])
            u = (math.cos(t), math.sin(t))
        else:
            v = [float(c) for c in params]
            nrm = math.hypot(*v)
            u = tuple(c / nrm for c in v) if nrm > 0 else (1.0,) + (0.0,) * (self.n - 1)
        if not self.is_half:
            r = self.g.radius
            return ExtendedPoint(tuple(c + r * a for c, a in zip(self.g.center.coords, u)))
        nu = self.g.normal
        diff = [a - b for a, b in zip(u, nu)]
        d2 = math.fsum(d * d for d in diff)
        if d2 < 1e-28:
            return INF
        o = self.g.offset
        return ExtendedPoint(tuple(o * b + b + 2.0 * d / d2 for b, d in zip(nu, diff)))

    def grid(self, k: int) -> tuple[np.ndarray, float]:
        """k parameter samples (plus infinity for a half-space) and their spacing."""
        if self.n == 2:
            params = (2.0 * np.pi * np.arange(k) / k)[:, None]
            if self.is_half:
                params = np.vstack([params, [[math.atan2(self.nu[1], self.nu[0])]]])
            return params, 2.0 * np.pi / k
        if self.n == 3:
            i = np.arange(k) + 0.5
            phi = np.arccos(1.0 - 2.0 * i / k)
            theta = np.pi * (1.0 + 5.0 ** 0.5) * i
            params = np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi),
                               np.cos(phi)], axis=-1)
        else:
            rng = np.random.default_rng(0)
            params = rng.standard_normal((k, self.n))
            params /= np.linalg.norm(params, axis=1, keepdims=True)
        if self.is_half:
            params = np.vstack([params, self.nu[None, :]])
        area = 2.0 * np.pi ** (self.n / 2) / math.gamma(self.n / 2)
        return params, (area / k) ** (1.0 / (self.n - 1))


def _default_grid(n: int) -> int:
    return {2: 1024, 3: 512 ** 2}.get(n, 100_000)


def _default_pair_grid(n: int) -> int:
    return {2: 256, 3: 400}.get(n, 600)


def _eval_single(objective, P, Pinf):
    batch = getattr(objective, "batch", None)
    if batch is not None:
        return np.asarray(batch(P, Pinf), dtype=float)
    pts = [INF if inf else ExtendedPoint(tuple(p)) for p, inf in zip(P, Pinf)]
    return np.array([objective(a) for a in pts], dtype=float)


def _eval_pairs(objective, P, Pinf):
    batch = getattr(objective, "batch", None)
    k = len(P)
    if batch is not None:
        vals = np.asarray(batch(P[:, None, :], Pinf[:, None], P[None, :, :], Pinf[None, :]),
                          dtype=float)
        vals = np.broadcast_to(vals, (k, k)).copy()
    else:
        pts = [INF if inf else ExtendedPoint(tuple(p)) for p, inf in zip(P, Pinf)]
        vals = np.array([[objective(a, b) if i != j else -np.inf for j, b in enumerate(pts)]
                         for i, a in enumerate(pts)], dtype=float)
    np.fill_diagonal(vals, -np.inf)
    return vals


def _tangent_frame(chart: "_SphereChart", p0: np.ndarray):
    """Local coordinates t -> params around p0 without the flat radial direction.

    In 2D the angle is already a chart.  For n >= 3 the parameter vector is
    only defined up to scale, which stalls Nelder-Mead; moving in the tangent
    plane of the unit sphere at p0 removes that direction.
    """
    if chart.n == 2:
        return np.array(p0, dtype=float), lambda t: t
    u0 = np.asarray(p0, dtype=float) / np.linalg.norm(p0)
    frame = np.linalg.svd(u0[None, :])[2][1:]
    return np.zeros(chart.n - 1), lambda t: u0 + t @ frame


def _refine(f, x0: np.ndarray, step: float, tol: float):
    """Nelder-Mead ascent from x0; function tolerance is relative to |f(x0)|."""
    d = len(x0)
    scale = abs(f(x0))
    scale = scale if math.isfinite(scale) and scale > 0 else 1.0
    simplex = np.vstack([x0] + [x0 + step * np.eye(d)[i] for i in range(d)])
    res = minimize(lambda t: -f(t) / scale, x0, method="Nelder-Mead",
                   options={"xatol": tol, "fatol": 1e-15, "initial_simplex": simplex,
                            "maxiter": 4000 * d, "maxfev": 8000 * d})
    return res.x, -res.fun * scale


def _safe(f):
    def wrapped(t):
        v = f(t)
        return v if math.isfinite(v) else -math.inf
    return wrapped


def sup_over_boundary(g: DomainSpec, objective, strategy: SupremumStrategy | None = None):
    """Maximize ``objective(a)`` over boundary points a; returns (value, witness)."""
    strategy = _resolve(g, strategy)
    if strategy.mode == "exhaustive":
        best, arg = -math.inf, None
        for a in g.points:
            v = objective(a)
            if v > best:
                best, arg = v, a
        if arg is None:
            raise ValueError("objective is not finite anywhere on the boundary")
        return best, arg

    chart = _SphereChart(g)
    params, spacing = chart.grid(strategy.grid_size or _default_grid(chart.n))
    vals = _eval_single(objective, *chart.points(params))
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    order = np.argsort(-vals, kind="stable")[: strategy.multistart_count]
    best_v, best_t = vals[order[0]], params[order[0]]
    for idx in order:
        t0, to_params = _tangent_frame(chart, params[idx])
        f = _safe(lambda t: objective(chart.point(to_params(t))))
        t, v = _refine(f, t0, spacing, strategy.refine_tolerance)
        if v > best_v:
            best_v, best_t = v, to_params(t)
    return float(best_v), chart.point(best_t)


def sup_over_boundary_pairs(g: DomainSpec, objective, strategy: SupremumStrategy | None = None):
    """Maximize ``objective(a, b)`` over ordered pairs of distinct boundary points.

    Returns (value, (a, b)).  Exhaustive ties go to the lexicographically
    first index pair.
    """
    strategy = _resolve(g, strategy)
    if strategy.mode == "exhaustive":
        best, arg = -math.inf, None
        pts = g.points
        for i, a in enumerate(pts):
            for j, b in enumerate(pts):
                if i == j:
                    continue
                v = objective(a, b)
                if v > best:
                    best, arg = v, (a, b)
        if arg is None:
            raise ValueError("objective is not finite anywhere on the boundary")
        return best, arg

    chart = _SphereChart(g)
    params, spacing = chart.grid(strategy.pair_grid_size or _default_pair_grid(chart.n))
    vals = _eval_pairs(objective, *chart.points(params))
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    flat = np.argsort(-vals, axis=None, kind="stable")[: strategy.multistart_count]
    i0, j0 = np.unravel_index(flat[0], vals.shape)
    best_v, best = vals[i0, j0], (params[i0], params[j0])
    for idx in flat:
        i, j = np.unravel_index(idx, vals.shape)
        ta, to_a = _tangent_frame(chart, params[i])
        tb, to_b = _tangent_frame(chart, params[j])
        k = len(ta)
        f = _safe(lambda t: objective(chart.point(to_a(t[:k])), chart.point(to_b(t[k:]))))
        t, v = _refine(f, np.concatenate([ta, tb]), spacing, strategy.refine_tolerance)
        if v > best_v:
            best_v, best = v, (to_a(t[:k]), to_b(t[k:]))
    return float(best_v), (chart.point(best[0]), chart.point(best[1]))


def boundary_spherical_diameter(g: DomainSpec, strategy: SupremumStrategy | None = None) -> float:
    """q(boundary): chordal diameter of the boundary (a lower bound for balls/half-spaces)."""
    obj = BoundaryObjective(chordal_distance, chordal_distance_array)
    value, _ = sup_over_boundary_pairs(g, obj, strategy)
    return value
