"""Moebius maps of R^n + {inf} stored as lists of primitive maps.

A map is applied left to right: ``MobiusMap((f, g)).apply(x) == g(f(x))``.
Keeping primitives (instead of a matrix form) gives exact handling of the
point at infinity and exact inverses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .extended_space import INF, ExtendedPoint, chordal_distance


def _vec(v) -> tuple[float, ...]:
    return tuple(float(c) for c in v)


def _dot(u, v) -> float:
    return math.fsum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class Inversion:
    """Inversion in the sphere S(center, radius)."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not self.radius > 0:
            raise ValueError("inversion radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    def __call__(self, x: ExtendedPoint) -> ExtendedPoint:
        if x.is_inf:
            return ExtendedPoint(self.center)
        diff = [a - c for a, c in zip(x.coords, self.center)]
        r2 = math.fsum(d * d for d in diff)
        if r2 == 0.0:
            return INF
        s = self.radius * self.radius / r2
        return ExtendedPoint(tuple(c + s * d for c, d in zip(self.center, diff)))

    def inverse(self) -> "Inversion":
        return self

    @property
    def dim(self):
        return len(self.center)

    def to_dict(self):
        return {"kind": "inversion", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Reflection:
    """Reflection in the hyperplane <x, normal> = offset."""

    normal: tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self):
        nrm = _vec(self.normal)
        if abs(math.hypot(*nrm) - 1.0) > 1e-12:
            raise ValueError("reflection normal must be a unit vector")
        object.__setattr__(self, "normal", nrm)
        object.__setattr__(self, "offset", float(self.offset))

    def __call__(self, x: ExtendedPoint) -> ExtendedPoint:
        if x.is_inf:
            return INF
        h = 2.0 * (_dot(x.coords, self.normal) - self.offset)
        return ExtendedPoint(tuple(a - h * v for a, v in zip(x.coords, self.normal)))

    def inverse(self) -> "Reflection":
        return self

    @property
    def dim(self):
        return len(self.normal)

    def to_dict(self):
        return {"kind": "reflection", "normal": list(self.normal), "offset": self.offset}


@dataclass(frozen=True)
class Scaling:
    """x -> factor * x."""

    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError("scaling factor must be positive")
        object.__setattr__(self, "factor", float(self.factor))

    def __call__(self, x: ExtendedPoint) -> ExtendedPoint:
        if x.is_inf:
            return INF
        return ExtendedPoint(tuple(self.factor * a for a in x.coords))

    def inverse(self) -> "Scaling":
        return Scaling(1.0 / self.factor)

    dim = None

    def to_dict(self):
        return {"kind": "scaling", "factor": self.factor}


@dataclass(frozen=True)
class Rotation:
    """x -> M x for an orthogonal matrix M (rows stored as tuples)."""

    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        m = tuple(_vec(row) for row in self.matrix)
        a = np.array(m)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("rotation matrix must be square")
        if not np.allclose(a @ a.T, np.eye(a.shape[0]), rtol=0, atol=1e-10):
            raise ValueError("rotation matrix must be orthogonal")
        object.__setattr__(self, "matrix", m)

    def __call__(self, x: ExtendedPoint) -> ExtendedPoint:
        if x.is_inf:
            return INF
        return ExtendedPoint(tuple(_dot(row, x.coords) for row in self.matrix))

    def inverse(self) -> "Rotation":
        return Rotation(tuple(zip(*self.matrix)))

    @property
    def dim(self):
        return len(self.matrix)

    def to_dict(self):
        return {"kind": "rotation", "matrix": [list(r) for r in self.matrix]}


@dataclass(frozen=True)
class Translation:
    """x -> x + vector."""

    vector: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "vector", _vec(self.vector))

    def __call__(self, x: ExtendedPoint) -> ExtendedPoint:
        if x.is_inf:
            return INF
        return ExtendedPoint(tuple(a + v for a, v in zip(x.coords, self.vector)))

    def inverse(self) -> "Translation":
        return Translation(tuple(-v for v in self.vector))

    @property
    def dim(self):
        return len(self.vector)

    def to_dict(self):
        return {"kind": "translation", "vector": list(self.vector)}


Primitive = Union[Inversion, Reflection, Scaling, Rotation, Translation]

_KINDS = {
    "inversion": lambda d: Inversion(d["center"], d["radius"]),
    "reflection": lambda d: Reflection(d["normal"], d.get("offset", 0.0)),
    "scaling": lambda d: Scaling(d["factor"]),
    "rotation": lambda d: Rotation(d["matrix"]),
    "translation": lambda d: Translation(d["vector"]),
}


def primitive_from_dict(d: dict) -> Primitive:
    try:
        return _KINDS[d["kind"]](d)
    except KeyError as exc:
        raise ValueError(f"bad primitive descriptor {d!r}") from exc


@dataclass(frozen=True)
class MobiusMap:
    primitives: tuple = field(default_factory=tuple)

    def __post_init__(self):
        prims = tuple(self.primitives)
        dims = {p.dim for p in prims if p.dim is not None}
        if len(dims) > 1:
            raise ValueError(f"primitives of mixed dimension: {sorted(dims)}")
        object.__setattr__(self, "primitives", prims)

    @property
    def dim(self) -> int | None:
        for p in self.primitives:
            if p.dim is not None:
                return p.dim
        return None

    def __call__(self, x: ExtendedPoint) -> ExtendedPoint:
        return apply(self, x)

    def to_list(self) -> list[dict]:
        return [p.to_dict() for p in self.primitives]

    @classmethod
    def from_list(cls, items: Sequence[dict]) -> "MobiusMap":
        return cls(tuple(primitive_from_dict(d) for d in items))


def apply(m: MobiusMap, x: ExtendedPoint) -> ExtendedPoint:
    if m.dim is not None and x.dim is not None and m.dim != x.dim:
        raise ValueError(f"map of dimension {m.dim} applied to a point of dimension {x.dim}")
    for prim in m.primitives:
        x = prim(x)
    return x


def compose(m1: MobiusMap, m2: MobiusMap) -> MobiusMap:
    """The map x -> m2(m1(x))."""
    return MobiusMap(m1.primitives + m2.primitives)


def inverse(m: MobiusMap) -> MobiusMap:
    return MobiusMap(tuple(p.inverse() for p in reversed(m.primitives)))


def random_mobius(seed: int, n: int) -> MobiusMap:
    """Deterministic pseudo-random composition of 1-4 primitives in R^n.

    Centers and translations lie in [-2, 2]^n, radii in [0.5, 2] and scaling
    factors in [0.5, 2], keeping the maps away from degenerate parameters.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n,)))
    prims = []
    for _ in range(int(rng.integers(1, 5))):
        kind = int(rng.integers(0, 5))
        if kind == 0:
            prims.append(Inversion(rng.uniform(-2, 2, n), rng.uniform(0.5, 2.0)))
        elif kind == 1:
            v = rng.standard_normal(n)
            prims.append(Reflection(v / np.linalg.norm(v), rng.uniform(-2, 2)))
        elif kind == 2:
            prims.append(Scaling(rng.uniform(0.5, 2.0)))
        elif kind == 3:
            q, r = np.linalg.qr(rng.standard_normal((n, n)))
            q = q * np.sign(np.diag(r))
            prims.append(Rotation(tuple(map(tuple, q))))
        else:
            prims.append(Translation(rng.uniform(-2, 2, n)))
    return MobiusMap(tuple(prims))


# -- domains ------------------------------------------------------------------

def _image_ball_halfspace(prim: Primitive, g):
    from .domains import Ball, HalfSpace

    if isinstance(g, Ball):
        c, r = g.center.coords, g.radius
        if isinstance(prim, Inversion):
            p, R = prim.center, prim.radius
            diff = [a - b for a, b in zip(c, p)]
            dist = math.hypot(*diff)
            R2 = R * R
            if dist > r:
                # image ball: the images of the nearest and farthest sphere
                # points along the line through p and c form a diameter
                s_near, s_far = R2 / (dist - r), R2 / (dist + r)
                u = [d / dist for d in diff]
                mid = (s_near + s_far) / 2.0
                return Ball(tuple(pp + mid * uu for pp, uu in zip(p, u)), (s_near - s_far) / 2.0)
            if dist == r:
                u = [d / r for d in diff]
                return HalfSpace(tuple(u), _dot(p, u) + R2 / (2.0 * r))
            raise ValueError("inversion center inside the ball: image contains infinity "
                             "(complement of a closed ball is not representable)")
        if isinstance(prim, Scaling):
            return Ball(tuple(prim.factor * a for a in c), prim.factor * r)
        return Ball(prim(ExtendedPoint(c)).coords, r)

    nu, o = g.normal, g.offset
    if isinstance(prim, Inversion):
        p, R = prim.center, prim.radius
        h = _dot(p, nu) - o
        if h < 0:
            rad = R * R / (2.0 * -h)
            return Ball(tuple(pp + rad * v for pp, v in zip(p, nu)), rad)
        if h == 0:
            return g
        raise ValueError("inversion center inside the half-space: image contains infinity "
                         "(complement of a closed ball is not representable)")
    if isinstance(prim, Scaling):
        return HalfSpace(nu, prim.factor * o)
    if isinstance(prim, Translation):
        return HalfSpace(nu, o + _dot(prim.vector, nu))
    if isinstance(prim, Rotation):
        return HalfSpace(tuple(_dot(row, nu) for row in prim.matrix), o)
    # reflection: map the normal linearly and a base point affinely
    mu = prim.normal
    k = 2.0 * _dot(nu, mu)
    new_nu = tuple(a - k * b for a, b in zip(nu, mu))
    base = prim(ExtendedPoint(tuple(o * v for v in nu)))
    return HalfSpace(new_nu, _dot(base.coords, new_nu))


def apply_domain(m: MobiusMap, g):
    """Image of a domain under ``m``.

    Finite complements and boundary clouds map pointwise (a cloud is flagged
    approximate once a non-similarity touches it).  Balls and half-spaces map
    to balls or half-spaces; an image containing infinity as an interior point
    raises ``ValueError``.
    """
    from .domains import Ball, BoundaryCloud, FiniteComplement, HalfSpace

    if isinstance(g, FiniteComplement):
        pts = tuple(apply(m, a) for a in g.points)
        return FiniteComplement(pts, euclidean_subset=any(p.is_inf for p in pts))
    if isinstance(g, BoundaryCloud):
        pts = tuple(apply(m, a) for a in g.points)
        approx = g.approximate or any(isinstance(p, Inversion) for p in m.primitives)
        return BoundaryCloud(pts, euclidean_subset=any(p.is_inf for p in pts), approximate=approx)
    if isinstance(g, (Ball, HalfSpace)):
        for prim in m.primitives:
            g = _image_ball_halfspace(prim, g)
        return g
    raise TypeError(f"unsupported domain {type(g).__name__}")


def max_chordal_deviation(m: MobiusMap, pts: Sequence[ExtendedPoint]) -> float:
    """Round-trip error of ``inverse(m)`` on ``pts`` in the chordal metric."""
    inv = inverse(m)
    return max(chordal_distance(inv(m(p)), p) for p in pts)
