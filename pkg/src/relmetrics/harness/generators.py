"""Seeded random finite-complement configurations.

Each case draws from its own generator seeded by ``(master seed, case index)``
through ``numpy.random.SeedSequence`` spawn keys, so any case can be replayed
alone and results do not depend on evaluation order or parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..domains import FiniteComplement, domain_to_dict
from ..extended_space import INF, ExtendedPoint, point_to_json
from ..metrics import FiniteBatch


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    card_min: int = 2
    card_max: int = 6
    box: float = 3.0
    min_separation: float = 1e-4
    max_retries: int = 100
    inf_point_rate: float = 0.1


def case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def derive_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, np.uint32)[0])


@dataclass
class Case:
    """A domain R^n minus ``m`` boundary points and ``k`` evaluation points.

    Rows flagged in ``binf`` / ``pinf`` stand for the point at infinity.
    """

    index: int
    boundary: np.ndarray
    binf: np.ndarray
    pts: np.ndarray
    pinf: np.ndarray
    _domain: FiniteComplement | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return len(self.boundary)

    @property
    def euclidean(self) -> bool:
        return bool(self.binf.any())

    def boundary_points(self) -> tuple[ExtendedPoint, ...]:
        return tuple(INF if f else ExtendedPoint(tuple(map(float, b)))
                     for b, f in zip(self.boundary, self.binf))

    def domain(self) -> FiniteComplement:
        if self._domain is None:
            self._domain = FiniteComplement(self.boundary_points(), euclidean_subset=self.euclidean)
        return self._domain

    def point(self, i: int) -> ExtendedPoint:
        return INF if self.pinf[i] else ExtendedPoint(tuple(map(float, self.pts[i])))

    def to_dict(self) -> dict:
        return {"case_index": self.index, "domain": domain_to_dict(self.domain()),
                "points": [point_to_json(self.point(i)) for i in range(len(self.pts))]}

    @classmethod
    def from_points(cls, index: int, boundary, points, n: int) -> "Case":
        B = np.zeros((len(boundary), n))
        binf = np.array([b.is_inf for b in boundary])
        for i, b in enumerate(boundary):
            if not b.is_inf:
                B[i] = b.coords
        P = np.zeros((len(points), n))
        pinf = np.array([p.is_inf for p in points])
        for i, p in enumerate(points):
            if not p.is_inf:
                P[i] = p.coords
        return cls(index, B, binf, P, pinf)


def separation_ok(B, binf, P, pinf, min_sep: float) -> bool:
    """Boundary points pairwise, and evaluation points against the boundary,
    are at least ``min_sep`` apart in the chordal metric."""
    A = np.concatenate([B, P])
    ainf = np.concatenate([binf, pinf])
    m = len(B)
    s = np.sqrt(1.0 + (A * A).sum(axis=1))
    diff = A[:m, None, :] - A[None, :, :]
    q = np.sqrt((diff * diff).sum(axis=-1)) / (s[:m, None] * s[None, :])
    # rows: boundary points; columns: boundary points then evaluation points
    q = np.where(binf[:, None], 1.0 / s[None, :], q)
    q = np.where(ainf[None, :], 1.0 / s[:m, None], q)
    q = np.where(binf[:, None] & ainf[None, :], 0.0, q)
    q[np.arange(m), np.arange(m)] = np.inf
    return bool(q.min() >= min_sep)


def generate_case(seed: int, index: int, n: int, n_points: int = 2,
                  euclidean: bool | None = None, params: GeneratorParams = GeneratorParams(),
                  card_min: int | None = None) -> Case:
    """Draw a domain with 2-6 boundary points in [-3, 3]^n and ``n_points`` points in it.

    ``euclidean=None`` flips a coin; a Euclidean domain has infinity on its
    boundary, otherwise one evaluation point may be infinity.
    """
    rng = case_rng(seed, index)
    eu = bool(rng.random() < 0.5) if euclidean is None else euclidean
    lo = max(card_min or params.card_min, 2)
    for _ in range(params.max_retries):
        m = int(rng.integers(lo, params.card_max + 1))
        B = rng.uniform(-params.box, params.box, (m, n))
        binf = np.zeros(m, dtype=bool)
        if eu:
            k = int(rng.integers(m))
            binf[k] = True
            B[k] = 0.0
        P = rng.uniform(-params.box, params.box, (n_points, n))
        pinf = np.zeros(n_points, dtype=bool)
        if not eu and rng.random() < params.inf_point_rate:
            k = int(rng.integers(n_points))
            pinf[k] = True
            P[k] = 0.0
        if separation_ok(B, binf, P, pinf, params.min_separation):
            return Case(index, B, binf, P, pinf)
    raise GenerationError(f"no admissible configuration for case {index} after "
                          f"{params.max_retries} retries")


class BatchSet:
    """Groups cases by boundary size and evaluates metrics on a point pair (i, j)."""

    def __init__(self, cases: list[Case], i: int = 0, j: int = 1):
        self.size = len(cases)
        groups: dict[int, list[int]] = {}
        for k, c in enumerate(cases):
            groups.setdefault(c.m, []).append(k)
        self.groups = []
        for m in sorted(groups):
            idx = np.array(groups[m])
            cs = [cases[k] for k in idx]
            batch = FiniteBatch(
                np.stack([c.boundary for c in cs]), np.stack([c.binf for c in cs]),
                np.stack([c.pts[i] for c in cs]), np.array([c.pinf[i] for c in cs]),
                np.stack([c.pts[j] for c in cs]), np.array([c.pinf[j] for c in cs]))
            self.groups.append((idx, batch))

    def metric(self, family: str, p: float | None = None) -> np.ndarray:
        out = np.full(self.size, np.nan)
        for idx, batch in self.groups:
            out[idx] = batch.metric(family, p)
        return out


def family_label(family: str, p: float | None) -> str:
    if p is None:
        return family
    return f"{family}[p={'inf' if math.isinf(p) else repr(p)}]"
