"""Points of the Moebius space R^n + {inf}, the chordal metric and cross-ratios.

Scalar routines work on :class:`ExtendedPoint` values and plain ``math``;
the ``*_array`` helpers are their numpy counterparts used by the batched
kernels.  Points at infinity are carried in arrays as a boolean mask next to
the coordinate array (coordinates of masked rows are ignored).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

MAX_COORD = 1e100
MIN_DIM = 2
MAX_DIM = 16


@dataclass(frozen=True)
class ExtendedPoint:
    """A finite point of R^n, or the single point at infinity (``coords=None``)."""

    coords: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.coords is None:
            return
        coords = tuple(float(c) for c in self.coords)
        if not MIN_DIM <= len(coords) <= MAX_DIM:
            raise ValueError(f"dimension must be in [{MIN_DIM}, {MAX_DIM}], got {len(coords)}")
        for c in coords:
            if not math.isfinite(c) or abs(c) > MAX_COORD:
                raise ValueError(f"coordinate {c!r} outside the supported range |c| <= 1e100")
        object.__setattr__(self, "coords", coords)

    @property
    def is_inf(self) -> bool:
        return self.coords is None

    @property
    def dim(self) -> int | None:
        return None if self.coords is None else len(self.coords)

    def norm(self) -> float:
        if self.coords is None:
            return math.inf
        return math.hypot(*self.coords)

    def array(self) -> np.ndarray:
        if self.coords is None:
            raise ValueError("the point at infinity has no coordinates")
        return np.array(self.coords)

    def __repr__(self):
        if self.coords is None:
            return "ExtendedPoint(inf)"
        return f"ExtendedPoint({', '.join(repr(c) for c in self.coords)})"


INF = ExtendedPoint()


def point(*coords: float) -> ExtendedPoint:
    """``point(1, 0)`` or ``point([1, 0])``."""
    if len(coords) == 1 and isinstance(coords[0], (Sequence, np.ndarray)):
        coords = tuple(coords[0])
    return ExtendedPoint(tuple(coords))


def basis(i: int, n: int, scale: float = 1.0) -> ExtendedPoint:
    """``scale * e_i`` in R^n with 1-based ``i``."""
    c = [0.0] * n
    c[i - 1] = float(scale)
    return ExtendedPoint(tuple(c))


def origin(n: int) -> ExtendedPoint:
    return ExtendedPoint((0.0,) * n)


def parse_point(text: str) -> ExtendedPoint:
    """Parse the literal syntax ``"0.5,0"`` or ``"inf"``."""
    s = text.strip()
    if s.lower() in ("inf", "infinity", "∞"):
        return INF
    try:
        return ExtendedPoint(tuple(float(t) for t in s.split(",")))
    except ValueError as exc:
        raise ValueError(f"bad point literal {text!r}: {exc}") from None


def format_point(p: ExtendedPoint) -> str:
    return "inf" if p.is_inf else ",".join(repr(c) for c in p.coords)


def point_to_json(p: ExtendedPoint):
    return "inf" if p.is_inf else list(p.coords)


def point_from_json(obj) -> ExtendedPoint:
    if isinstance(obj, str):
        if obj.strip().lower() != "inf":
            return parse_point(obj)
        return INF
    return ExtendedPoint(tuple(obj))


def check_same_dim(*pts: ExtendedPoint) -> int | None:
    dims = {p.dim for p in pts if not p.is_inf}
    if len(dims) > 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop() if dims else None


def _pdist(u: ExtendedPoint, v: ExtendedPoint) -> float:
    # Euclidean distance with the point at infinity contributing a unit factor;
    # plugged into the Euclidean cross-ratio this gives the exact limit forms.
    if u.coords is None:
        return 0.0 if v.coords is None else 1.0
    if v.coords is None:
        return 1.0
    return math.dist(u.coords, v.coords)


def chordal_distance(x: ExtendedPoint, y: ExtendedPoint) -> float:
    """Spherical (chordal) distance q(x, y), bounded by 1."""
    check_same_dim(x, y)
    if x.is_inf or y.is_inf:
        if x.is_inf and y.is_inf:
            return 0.0
        z = y if x.is_inf else x
        return 1.0 / math.sqrt(1.0 + math.fsum(c * c for c in z.coords))
    d = math.dist(x.coords, y.coords)
    if d == 0.0:
        return 0.0
    q = d / (math.sqrt(1.0 + math.fsum(c * c for c in x.coords))
             * math.sqrt(1.0 + math.fsum(c * c for c in y.coords)))
    return min(q, 1.0)


def cross_ratio(a: ExtendedPoint, b: ExtendedPoint, c: ExtendedPoint, d: ExtendedPoint) -> float:
    """Absolute cross-ratio |a,b,c,d| = |a-c||b-d| / (|a-b||c-d|).

    Factors involving the point at infinity are dropped, which is the exact
    value of the chordal quotient q(a,c)q(b,d)/(q(a,b)q(c,d)).
    """
    check_same_dim(a, b, c, d)
    if a == b or c == d:
        raise ValueError("degenerate cross-ratio: needs a != b and c != d")
    # grouped as products so that swapping the roles of (a, c) or (b, d) is bit-exact
    return (_pdist(a, c) * _pdist(b, d)) / (_pdist(a, b) * _pdist(c, d))


def arch1p(w: float) -> float:
    """arch(1 + w) for w >= 0, accurate when w is tiny."""
    if w < 0.0:
        raise ValueError(f"arch1p needs w >= 0, got {w!r}")
    if w > 2.0 ** 26:
        return math.acosh(1.0 + w)
    return math.log1p(w + math.sqrt(w * (w + 2.0)))


def arch(t: float) -> float:
    """Inverse hyperbolic cosine on [1, inf)."""
    if not t >= 1.0:
        raise ValueError(f"arch needs t >= 1, got {t!r}")
    # t - 1 is exact for 1 <= t < 2**53
    return arch1p(t - 1.0)


def arsh(t: float) -> float:
    """Inverse hyperbolic sine on [0, inf)."""
    if not t >= 0.0:
        raise ValueError(f"arsh needs t >= 0, got {t!r}")
    return math.asinh(t)


def spherical_diameter(points: Iterable[ExtendedPoint]) -> float:
    """Largest chordal distance between two points of a finite set."""
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("spherical diameter needs at least two points")
    check_same_dim(*pts)
    return max(chordal_distance(u, v) for u, v in combinations(pts, 2))


# -- numpy counterparts ------------------------------------------------------

def split_points(pts: Sequence[ExtendedPoint], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Stack points into (coords, inf_mask); infinite rows get zero coordinates."""
    arr = np.zeros((len(pts), n))
    mask = np.zeros(len(pts), dtype=bool)
    for i, p in enumerate(pts):
        if p.is_inf:
            mask[i] = True
        else:
            arr[i] = p.coords
    return arr, mask


def pseudo_distance_array(P, Pinf, Q, Qinf) -> np.ndarray:
    """Broadcasting version of the unit-factor distance used by :func:`cross_ratio`."""
    diff = np.asarray(P) - np.asarray(Q)
    d = np.sqrt(np.einsum("...i,...i->...", diff, diff))
    one_inf = np.logical_xor(Pinf, Qinf)
    both_inf = np.logical_and(Pinf, Qinf)
    return np.where(both_inf, 0.0, np.where(one_inf, 1.0, d))


def chordal_distance_array(P, Pinf, Q, Qinf) -> np.ndarray:
    P = np.asarray(P)
    Q = np.asarray(Q)
    sp = np.sqrt(1.0 + np.einsum("...i,...i->...", P, P))
    sq = np.sqrt(1.0 + np.einsum("...i,...i->...", Q, Q))
    diff = P - Q
    d = np.sqrt(np.einsum("...i,...i->...", diff, diff))
    finite = np.minimum(d / (sp * sq), 1.0)
    out = np.where(Pinf, 1.0 / sq, np.where(Qinf, 1.0 / sp, finite))
    return np.where(np.logical_and(Pinf, Qinf), 0.0, out)


def arch1p_array(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    big = w > 2.0 ** 26
    safe = np.where(big, 0.0, w)
    small = np.log1p(safe + np.sqrt(safe * (safe + 2.0)))
    return np.where(big, np.arccosh(1.0 + np.where(big, w, 1.0)), small)
