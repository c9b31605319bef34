"""Verification reports and per-inequality tallies."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np


def jsonable(obj):
    """Recursively convert numpy scalars and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


@dataclass
class Tally:
    """Counts and margins for one inequality ``lhs <= rhs``.

    ``relative`` margins are (rhs - lhs) / |rhs|; otherwise rhs - lhs.  A case
    violates the inequality when its margin is below ``-tolerance``.
    Non-asserted tallies are probes: they count violations but never fail.
    """

    name: str
    tolerance: float
    relative: bool = True
    asserted: bool = True
    n_checked: int = 0
    n_violations: int = 0
    worst_margin: float | None = None
    max_ratio: float | None = None

    def add(self, lhs, rhs) -> np.ndarray:
        """Record a vector of cases; returns the indices that violate."""
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        if lhs.size == 0:
            return np.zeros(0, dtype=int)
        diff = rhs - lhs
        if self.relative:
            scale = np.abs(rhs)
            margin = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), diff)
            ratio = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.where(lhs > 0, np.inf, 1.0))
            mr = float(ratio.max())
            self.max_ratio = mr if self.max_ratio is None else max(self.max_ratio, mr)
        else:
            margin = diff
        bad = np.flatnonzero(margin < -self.tolerance)
        self.n_checked += int(lhs.size)
        self.n_violations += int(bad.size)
        wm = float(margin.min())
        self.worst_margin = wm if self.worst_margin is None else min(self.worst_margin, wm)
        return bad

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    suite: str
    seed: int
    dimension: int
    n_cases: int = 0
    n_violations: int = 0
    worst_margin: float | None = None
    sharpest_ratio: float | None = None
    witnesses: list = field(default_factory=list)
    runtime_ms: float = 0.0
    config: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    anchors: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    probe: bool = False
    n_skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.probe or self.n_violations == 0

    def absorb(self, tallies: list[Tally]):
        """Fill the summary fields from asserted tallies (all tallies for a probe)."""
        counted = [t for t in tallies if t.asserted or self.probe]
        for t in tallies:
            self.checks[t.name] = t.to_dict()
        self.n_violations = sum(t.n_violations for t in counted)
        margins = [t.worst_margin for t in counted if t.worst_margin is not None]
        ratios = [t.max_ratio for t in counted if t.max_ratio is not None]
        self.worst_margin = min(margins) if margins else None
        self.sharpest_ratio = max(ratios) if ratios else None

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        if not include_runtime:
            d.pop("runtime_ms")
        return jsonable(d)

    def to_json(self, include_runtime: bool = True) -> str:
        return json.dumps(self.to_dict(include_runtime), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        d = dict(d)
        d.pop("passed", None)
        return cls(**d)

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    def summary(self) -> str:
        status = "PROBE" if self.probe else ("PASS" if self.passed else "FAIL")
        wm = "n/a" if self.worst_margin is None else f"{self.worst_margin:.3e}"
        sr = "n/a" if self.sharpest_ratio is None else f"{self.sharpest_ratio:.12g}"
        return (f"[{status}] {self.suite} n={self.dimension} seed={self.seed} cases={self.n_cases} "
                f"violations={self.n_violations} worst_margin={wm} sharpest_ratio={sr} "
                f"({self.runtime_ms:.0f} ms)")
