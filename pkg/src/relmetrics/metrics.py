"""The relative metrics rho, delta^p, j^p, j and the pointed j_{G,b}.

Each public function returns a :class:`MetricValue` carrying the extremizing
boundary witnesses.  The exponent ``p`` is a positive float; ``math.inf``
selects the max-formulas (never a large-p approximation).

:class:`FiniteBatch` evaluates the same formulas with numpy for many
finite-complement configurations at once; the verification harness relies
on it and the tests cross-check it against the scalar path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import (
    BoundaryObjective,
    contains,
    DomainSpec,
    HalfSpace,
    Ball,
    SupremumStrategy,
    _resolve,
    distance_to_boundary,
    require_member,
    sup_over_boundary,
    sup_over_boundary_pairs,
)
from .extended_space import (
    ExtendedPoint,
    _pdist,
    arch1p,
    arch1p_array,
    check_same_dim,
    point_from_json,
    point_to_json,
    pseudo_distance_array,
)

METRIC_IDS = ("rho", "delta", "delta_p", "j", "j_p", "j_pointed")


def parse_exponent(p) -> float:
    if isinstance(p, str):
        p = math.inf if p.strip().lower() in ("inf", "infinity", "∞") else float(p)
    p = float(p)
    if not p > 0 or math.isnan(p):
        raise ValueError(f"exponent must be positive, got {p!r}")
    return p


def combine(u: float, v: float, p: float) -> float:
    """(u^p + v^p)^(1/p) for u, v >= 0, with p = inf meaning max(u, v)."""
    hi, lo = (u, v) if u >= v else (v, u)
    if p == math.inf or hi == 0.0:
        return hi
    return hi * (1.0 + (lo / hi) ** p) ** (1.0 / p)


def combine_array(u, v, p: float):
    hi = np.maximum(u, v)
    if p == math.inf:
        return hi
    lo = np.minimum(u, v)
    safe = np.where(hi == 0.0, 1.0, hi)
    return np.where(hi == 0.0, 0.0, hi * (1.0 + (lo / safe) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class MetricValue:
    metric: str
    value: float
    witnesses: tuple[ExtendedPoint, ...] = ()
    exactness: str = "exact"
    exponent: float | None = None

    def to_dict(self) -> dict:
        exp = self.exponent
        if exp is not None and math.isinf(exp):
            exp = "inf"
        return {"metric": self.metric, "value": self.value,
                "witnesses": [point_to_json(w) for w in self.witnesses],
                "exactness": self.exactness, "exponent": exp}

    @classmethod
    def from_dict(cls, d: dict) -> "MetricValue":
        exp = d.get("exponent")
        return cls(d["metric"], float(d["value"]),
                   tuple(point_from_json(w) for w in d.get("witnesses", ())),
                   d.get("exactness", "exact"),
                   None if exp is None else parse_exponent(exp))


def _exactness(strategy: SupremumStrategy) -> str:
    return "exact" if strategy.mode == "exhaustive" else "refined-lower-bound"


def _prepare(g: DomainSpec, x: ExtendedPoint, y: ExtendedPoint, strategy, euclidean=False):
    check_same_dim(x, y)
    require_member(g, x, "x")
    require_member(g, y, "y")
    if euclidean:
        if not g.euclidean_subset:
            raise ValueError("j metrics need a domain declared as a subset of R^n")
    return _resolve(g, strategy) if strategy is not False else None


def _point_arrays(x: ExtendedPoint, n: int):
    if x.is_inf:
        return np.zeros(n), True
    return np.array(x.coords), False


# -- rho ------------------------------------------------------------------------

def rho_objective(x: ExtendedPoint, y: ExtendedPoint, n: int) -> BoundaryObjective:
    """(a, b) -> |a,x,b,y| |a,y,b,x| / 2, the argument of arch(1 + .)."""
    dxy = _pdist(x, y)
    X, xi = _point_arrays(x, n)
    Y, yi = _point_arrays(y, n)

    def scalar(a, b):
        dab = _pdist(a, b)
        t1 = (dab * dxy) / (_pdist(a, x) * _pdist(b, y))
        t2 = (dab * dxy) / (_pdist(a, y) * _pdist(b, x))
        return t1 * t2 / 2.0

    def batch(A, Ai, B, Bi):
        dab = pseudo_distance_array(A, Ai, B, Bi)
        t1 = (dab * dxy) / (pseudo_distance_array(A, Ai, X, xi) * pseudo_distance_array(B, Bi, Y, yi))
        t2 = (dab * dxy) / (pseudo_distance_array(A, Ai, Y, yi) * pseudo_distance_array(B, Bi, X, xi))
        return t1 * t2 / 2.0

    return BoundaryObjective(scalar, batch)


def rho(g: DomainSpec, x: ExtendedPoint, y: ExtendedPoint,
        strategy: SupremumStrategy | None = None) -> MetricValue:
    """Generalized hyperbolic metric: sup over boundary pairs of arch(1 + |a,x,b,y||a,y,b,x|/2)."""
    strategy = _prepare(g, x, y, strategy)
    if x == y:
        return MetricValue("rho", 0.0, (), _exactness(strategy))
    w, wit = sup_over_boundary_pairs(g, rho_objective(x, y, g.dim), strategy)
    return MetricValue("rho", arch1p(w), wit, _exactness(strategy))


# -- delta^p --------------------------------------------------------------------

def delta_objective(x: ExtendedPoint, y: ExtendedPoint, n: int, p: float) -> BoundaryObjective:
    """(a, b) -> (|x,a,y,b|^p + |x,b,y,a|^p)^(1/p)."""
    dxy = _pdist(x, y)
    X, xi = _point_arrays(x, n)
    Y, yi = _point_arrays(y, n)

    def scalar(a, b):
        dab = _pdist(a, b)
        t1 = (dxy * dab) / (_pdist(x, a) * _pdist(y, b))
        t2 = (dxy * dab) / (_pdist(x, b) * _pdist(y, a))
        return combine(t1, t2, p)

    def batch(A, Ai, B, Bi):
        dab = pseudo_distance_array(A, Ai, B, Bi)
        t1 = (dxy * dab) / (pseudo_distance_array(A, Ai, X, xi) * pseudo_distance_array(B, Bi, Y, yi))
        t2 = (dxy * dab) / (pseudo_distance_array(B, Bi, X, xi) * pseudo_distance_array(A, Ai, Y, yi))
        return combine_array(t1, t2, p)

    return BoundaryObjective(scalar, batch)


def delta_p(g: DomainSpec, x: ExtendedPoint, y: ExtendedPoint, p: float = math.inf,
            strategy: SupremumStrategy | None = None) -> MetricValue:
    """sup over boundary pairs of log(1 + (|x,a,y,b|^p + |x,b,y,a|^p)^(1/p))."""
    p = parse_exponent(p)
    strategy = _prepare(g, x, y, strategy)
    if x == y:
        return MetricValue("delta_p", 0.0, (), _exactness(strategy), p)
    v, wit = sup_over_boundary_pairs(g, delta_objective(x, y, g.dim, p), strategy)
    return MetricValue("delta_p", math.log1p(v), wit, _exactness(strategy), p)


def delta(g: DomainSpec, x: ExtendedPoint, y: ExtendedPoint,
          strategy: SupremumStrategy | None = None) -> MetricValue:
    """Seittenranta's metric, the p = inf member of the delta^p family."""
    mv = delta_p(g, x, y, math.inf, strategy)
    return MetricValue("delta", mv.value, mv.witnesses, mv.exactness, None)


# -- j family -------------------------------------------------------------------

def j_objective(x: ExtendedPoint, y: ExtendedPoint, n: int, p: float) -> BoundaryObjective:
    """a -> (|x-y|^p/|x-a|^p + |x-y|^p/|y-a|^p)^(1/p); zero at infinity."""
    dxy = math.dist(x.coords, y.coords)
    X, Y = np.array(x.coords), np.array(y.coords)

    def scalar(a):
        if a.is_inf:
            return 0.0
        return combine(dxy / math.dist(x.coords, a.coords), dxy / math.dist(y.coords, a.coords), p)

    def batch(A, Ai):
        dx = np.linalg.norm(A - X, axis=-1)
        dy = np.linalg.norm(A - Y, axis=-1)
        return np.where(Ai, 0.0, combine_array(dxy / np.where(Ai, 1.0, dx),
                                               dxy / np.where(Ai, 1.0, dy), p))

    return BoundaryObjective(scalar, batch)


def j_p(g: DomainSpec, x: ExtendedPoint, y: ExtendedPoint, p: float = math.inf,
        strategy: SupremumStrategy | None = None) -> MetricValue:
    """sup over finite boundary points of log(1 + (|x-y|^p/|x-a|^p + |x-y|^p/|y-a|^p)^(1/p))."""
    p = parse_exponent(p)
    strategy = _prepare(g, x, y, strategy, euclidean=True)
    if x == y:
        return MetricValue("j_p", 0.0, (), _exactness(strategy), p)
    v, wit = sup_over_boundary(g, j_objective(x, y, g.dim, p), strategy)
    return MetricValue("j_p", math.log1p(v), (wit,), _exactness(strategy), p)


def j_classic(g: DomainSpec, x: ExtendedPoint, y: ExtendedPoint) -> MetricValue:
    """log(1 + |x-y| / min(d(x), d(y))) with d the Euclidean distance to the boundary."""
    _prepare(g, x, y, False, euclidean=True)
    if x == y:
        return MetricValue("j", 0.0)
    dx = distance_to_boundary(g, x)
    dy = distance_to_boundary(g, y)
    return MetricValue("j", math.log1p(math.dist(x.coords, y.coords) / min(dx, dy)))


def pointed_objective(x: ExtendedPoint, y: ExtendedPoint, b: ExtendedPoint, n: int,
                      p: float = math.inf) -> BoundaryObjective:
    """a -> combine(|x,a,y,b|, |x,b,y,a|); the max for p = inf."""
    dxy = _pdist(x, y)
    dxb, dyb = _pdist(x, b), _pdist(y, b)
    X, xi = _point_arrays(x, n)
    Y, yi = _point_arrays(y, n)
    Bb, bi = _point_arrays(b, n)

    def scalar(a):
        dab = _pdist(a, b)
        return combine((dxy * dab) / (_pdist(x, a) * dyb), (dxy * dab) / (dxb * _pdist(y, a)), p)

    def batch(A, Ai):
        dab = pseudo_distance_array(A, Ai, Bb, bi)
        t1 = (dxy * dab) / (pseudo_distance_array(A, Ai, X, xi) * dyb)
        t2 = (dxy * dab) / (dxb * pseudo_distance_array(A, Ai, Y, yi))
        return combine_array(t1, t2, p)

    return BoundaryObjective(scalar, batch)


def delta_p_pointed(g: DomainSpec, b: ExtendedPoint, x: ExtendedPoint, y: ExtendedPoint,
                    p: float = math.inf, strategy: SupremumStrategy | None = None) -> MetricValue:
    """delta^p with the second boundary slot frozen at ``b`` (b outside G)."""
    p = parse_exponent(p)
    check_same_dim(b, x, y)
    if b.dim is not None and b.dim != g.dim:
        raise ValueError("b has the wrong dimension")
    if contains(g, b):
        raise ValueError("b is inside G")
    strategy = _prepare(g, x, y, strategy)
    if x == y:
        return MetricValue("j_pointed", 0.0, (), _exactness(strategy), p)
    v, wit = sup_over_boundary(g, pointed_objective(x, y, b, g.dim, p), strategy)
    return MetricValue("j_pointed", math.log1p(v), (wit, b), _exactness(strategy), p)


def j_pointed(g: DomainSpec, b: ExtendedPoint, x: ExtendedPoint, y: ExtendedPoint,
              strategy: SupremumStrategy | None = None) -> MetricValue:
    """j_{G,b}: sup over a of log(1 + max(|x,a,y,b|, |x,b,y,a|)); j_G is the case b = inf."""
    mv = delta_p_pointed(g, b, x, y, math.inf, strategy)
    return MetricValue("j_pointed", mv.value, mv.witnesses, mv.exactness, None)


# -- closed forms ---------------------------------------------------------------

def hyperbolic_closed_form(g: Ball | HalfSpace, x: ExtendedPoint, y: ExtendedPoint) -> float:
    """Hyperbolic distance (curvature -1) in a ball or half-space."""
    if not isinstance(g, (Ball, HalfSpace)):
        raise TypeError("closed form exists only for balls and half-spaces")
    require_member(g, x, "x")
    require_member(g, y, "y")
    if x == y:
        return 0.0
    d2 = math.dist(x.coords, y.coords) ** 2
    if isinstance(g, Ball):
        r = g.radius
        rx = math.dist(x.coords, g.center.coords)
        ry = math.dist(y.coords, g.center.coords)
        return arch1p(2.0 * r * r * d2 / ((r - rx) * (r + rx) * (r - ry) * (r + ry)))
    return arch1p(d2 / (2.0 * g.height(x) * g.height(y)))


def compute(metric: str, g: DomainSpec, x: ExtendedPoint, y: ExtendedPoint,
            p=None, b: ExtendedPoint | None = None,
            strategy: SupremumStrategy | None = None) -> MetricValue:
    """Dispatch on a metric id (see METRIC_IDS)."""
    if metric == "rho":
        return rho(g, x, y, strategy)
    if metric == "delta":
        return delta(g, x, y, strategy)
    if metric == "delta_p":
        return delta_p(g, x, y, math.inf if p is None else p, strategy)
    if metric == "j":
        return j_classic(g, x, y)
    if metric == "j_p":
        return j_p(g, x, y, math.inf if p is None else p, strategy)
    if metric == "j_pointed":
        if b is None:
            raise ValueError("j_pointed needs the point b")
        return j_pointed(g, b, x, y, strategy)
    raise ValueError(f"unknown metric {metric!r}; expected one of {', '.join(METRIC_IDS)}")


# -- batched kernel ---------------------------------------------------------------

@dataclass
class FiniteBatch:
    """Many finite-complement configurations with a common boundary size m.

    Arrays: ``B`` (N, m, n) boundary coordinates with ``Binf`` (N, m) marking
    the point at infinity, and the two evaluation points ``X``, ``Y`` (N, n)
    with masks ``Xinf``, ``Yinf``.
    """

    B: np.ndarray
    Binf: np.ndarray
    X: np.ndarray
    Xinf: np.ndarray
    Y: np.ndarray
    Yinf: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    def _dists(self):
        if "d" not in self._cache:
            dxy = pseudo_distance_array(self.X, self.Xinf, self.Y, self.Yinf)
            dxa = pseudo_distance_array(self.B, self.Binf, self.X[:, None, :], self.Xinf[:, None])
            dya = pseudo_distance_array(self.B, self.Binf, self.Y[:, None, :], self.Yinf[:, None])
            dab = pseudo_distance_array(self.B[:, :, None, :], self.Binf[:, :, None],
                                        self.B[:, None, :, :], self.Binf[:, None, :])
            self._cache["d"] = dxy, dxa, dya, dab
        return self._cache["d"]

    @property
    def cross(self) -> np.ndarray:
        """T[k, a, b] = |x,a,y,b|; T[k, b, a] = |x,b,y,a|; zero on the diagonal."""
        if "T" not in self._cache:
            dxy, dxa, dya, dab = self._dists()
            T = (dxy[:, None, None] * dab) / (dxa[:, :, None] * dya[:, None, :])
            idx = np.arange(T.shape[1])
            T[:, idx, idx] = 0.0
            self._cache["T"] = T
        return self._cache["T"]

    def rho(self) -> np.ndarray:
        T = self.cross
        return arch1p_array((T * np.swapaxes(T, 1, 2)).max(axis=(1, 2)) / 2.0)

    def delta_p(self, p: float) -> np.ndarray:
        T = self.cross
        return np.log1p(combine_array(T, np.swapaxes(T, 1, 2), p).max(axis=(1, 2)))

    def _ratios(self):
        if np.any(self.Xinf | self.Yinf) or not np.all(self.Binf.any(axis=1)):
            raise ValueError("j metrics need Euclidean configurations (finite x, y; inf on the boundary)")
        dxy, dxa, dya, _ = self._dists()
        return dxy, np.where(self.Binf, np.inf, dxa), np.where(self.Binf, np.inf, dya)

    def j_p(self, p: float) -> np.ndarray:
        dxy, dxa, dya = self._ratios()
        return np.log1p(combine_array(dxy[:, None] / dxa, dxy[:, None] / dya, p).max(axis=1))

    def j_classic(self) -> np.ndarray:
        dxy, dxa, dya = self._ratios()
        return np.log1p(dxy / np.minimum(dxa.min(axis=1), dya.min(axis=1)))

    def metric(self, family: str, p: float | None = None) -> np.ndarray:
        if family == "rho":
            return self.rho()
        if family == "delta":
            return self.delta_p(math.inf)
        if family == "delta_p":
            return self.delta_p(p)
        if family == "j":
            return self.j_classic()
        if family == "j_p":
            return self.j_p(p)
        raise ValueError(f"unknown metric family {family!r}")
