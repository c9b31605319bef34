"""Sharpness sweeps: evaluate the extremal witness sequences and trace the ratios.

Each case walks a one-parameter family of configurations toward the extremal
limit, records the ratio of the two metrics at every step, and checks that
the final ratio is close to the claimed constant and that the last decade of
the trace approaches it monotonically.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .. import metrics as M
from ..domains import punctured, upper_half_space
from ..extended_space import ExtendedPoint, basis, origin, point_to_json
from .report import VerificationReport, jsonable
from .suites import SHARP

MONOTONE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SweepCase:
    """``start`` and ``stop`` bound the sweep parameter on a log scale; ``tolerance``
    applies to the ratio at ``stop``."""

    name: str
    description: str
    start: float
    stop: float
    tolerance: float


CASES = {
    "thm13i-upper": SweepCase("thm13i-upper", "rho/delta on R^n minus {0} at x=e1, y=-e1",
                              1.0, 1.0, 1e-12),
    "thm13ii-lower": SweepCase("thm13ii-lower", "rho/j on H^n at x=e_n, y=t e_n",
                               1.5, 100.0, 1e-10),
    "thm15-lower": SweepCase("thm15-lower", "j^q/j^p on R^n minus {0}, y=e1, x=t e2 as t grows",
                             10.0, 1e12, 1e-6),
    "thm15-upper": SweepCase("thm15-upper", "delta^q/delta^p on R^n minus {0}, |x|=|y|=1, |x-y|=s -> 0",
                             1e-1, 1e-6, 1e-5),
    "thm15iii": SweepCase("thm15iii", "delta^p/j^p on R^n minus {-e1, e1}, x=eps e2, y=-eps e2",
                          1e-1, 1e-3, 5e-3),
}


def _sweep_values(case: SweepCase, resolution: int) -> np.ndarray:
    if case.start == case.stop:
        return np.array([case.start])
    decades = abs(math.log10(case.stop / case.start))
    k = max(int(round(decades * resolution)), 1) + 1
    return np.geomspace(case.start, case.stop, k)


def _chord_pair(s: float, n: int):
    """Unit vectors at Euclidean distance s, symmetric about e1."""
    half = math.asin(s / 2.0)
    x = [0.0] * n
    y = [0.0] * n
    x[0] = y[0] = math.cos(half)
    x[1], y[1] = math.sin(half), -math.sin(half)
    return ExtendedPoint(tuple(x)), ExtendedPoint(tuple(y))


def claimed_limit(case_id: str, p: float, q: float) -> float:
    if case_id == "thm13i-upper":
        return SHARP.c_13i
    if case_id in ("thm13ii-lower", "thm15-lower"):
        return 1.0
    if case_id == "thm15-upper":
        return SHARP.c_15(p, q)
    if case_id == "thm15iii":
        return SHARP.c_15iii
    raise ValueError(f"unknown sharpness case {case_id!r}; expected one of {', '.join(CASES)}")


def _ratio(case_id: str, t: float, n: int, p: float, q: float) -> tuple[float, dict]:
    """Ratio at sweep parameter ``t`` plus the configuration that produced it."""
    if case_id == "thm13i-upper":
        g = punctured(origin(n))
        x, y = basis(1, n), basis(1, n, -1.0)
        num, den = M.rho(g, x, y).value, M.delta(g, x, y).value
    elif case_id == "thm13ii-lower":
        g = upper_half_space(n)
        x, y = basis(n, n), basis(n, n, t)
        num, den = M.rho(g, x, y).value, M.j_classic(g, x, y).value
    elif case_id == "thm15-lower":
        g = punctured(origin(n))
        x, y = basis(2, n, t), basis(1, n)
        num, den = M.j_p(g, x, y, q).value, M.j_p(g, x, y, p).value
    elif case_id == "thm15-upper":
        g = punctured(origin(n))
        x, y = _chord_pair(t, n)
        num, den = M.delta_p(g, x, y, q).value, M.delta_p(g, x, y, p).value
    elif case_id == "thm15iii":
        g = punctured(basis(1, n, -1.0), basis(1, n))
        x, y = basis(2, n, t), basis(2, n, -t)
        num, den = M.delta_p(g, x, y, p).value, M.j_p(g, x, y, p).value
    else:
        raise ValueError(f"unknown sharpness case {case_id!r}; expected one of {', '.join(CASES)}")
    return num / den, {"parameter": t, "x": point_to_json(x), "y": point_to_json(y),
                       "numerator": num, "denominator": den, "ratio": num / den}


def _small_quantity(case_id: str, t: float) -> float:
    """Variable in which the ratio is approximately linear near the limit."""
    if case_id == "thm15-lower":
        return 1.0 / (t * math.log(t))
    if case_id == "thm13ii-lower":
        return 1.0 / t
    return t


def _extrapolate(case_id: str, trace: list[dict]) -> float:
    """Linear extrapolation of the last two trace points to the limit."""
    if len(trace) < 2:
        return trace[-1]["ratio"]
    a, b = trace[-2], trace[-1]
    ha, hb = _small_quantity(case_id, a["parameter"]), _small_quantity(case_id, b["parameter"])
    if ha == hb:
        return b["ratio"]
    return b["ratio"] - hb * (a["ratio"] - b["ratio"]) / (ha - hb)


def final_decade_monotone(trace: list[dict], limit: float, tol: float = MONOTONE_TOLERANCE):
    """Distances to ``limit`` never grow (beyond ``tol``) over the last decade of the sweep.

    Returns (ok, index of the first offending step or None).
    """
    if len(trace) < 2:
        return True, None
    stop = trace[-1]["parameter"]
    lo, hi = sorted((stop / 10.0, stop * 10.0))
    idx = [k for k, tr in enumerate(trace)
           if (lo <= tr["parameter"] <= stop) or (stop <= tr["parameter"] <= hi)]
    for k0, k1 in zip(idx, idx[1:]):
        if abs(trace[k1]["ratio"] - limit) > abs(trace[k0]["ratio"] - limit) + tol:
            return False, k1
    return True, None


def witness_closed_forms(eps: float, p: float) -> dict:
    """delta^p at the witness: brute force versus two closed forms."""
    n = 2
    g = punctured(basis(1, n, -1.0), basis(1, n))
    brute = M.delta_p(g, basis(2, n, eps), basis(2, n, -eps), p).value
    c = 2.0 ** (1.0 / p + 2.0) * eps if not math.isinf(p) else 4.0 * eps
    return {"eps": eps, "p": p, "brute_force": brute,
            "denominator_1_plus_eps2": math.log1p(c / (1.0 + eps * eps)),
            "sqrt_denominator": math.log1p(c / math.sqrt(1.0 + eps * eps))}


def sharpness_sweep(case_id: str, resolution: int = 4, dim: int = 2, p: float = math.inf,
                    q: float = 1.0, stop: float | None = None) -> VerificationReport:
    """Run one sharpness case; ``resolution`` is the number of trace points per decade."""
    if case_id not in CASES:
        raise ValueError(f"unknown sharpness case {case_id!r}; expected one of {', '.join(CASES)}")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    p, q = M.parse_exponent(p), M.parse_exponent(q)
    if case_id in ("thm15-lower", "thm15-upper") and not q <= p:
        raise ValueError("needs q <= p")
    if case_id == "thm15iii" and p < 1:
        raise ValueError("the delta^p <= 2 j^p sweep needs p >= 1")
    t0 = time.perf_counter()
    case = CASES[case_id]
    if stop is not None:
        case = SweepCase(case.name, case.description, case.start, stop, case.tolerance)
    limit = claimed_limit(case_id, p, q)
    report = VerificationReport(f"sharpness:{case_id}", 0, dim,
                                config=jsonable({"case": case_id, "resolution": resolution,
                                                 "p": p, "q": q, "start": case.start,
                                                 "stop": case.stop, "tolerance": case.tolerance}))
    for t in _sweep_values(case, resolution):
        _, entry = _ratio(case_id, float(t), dim, p, q)
        report.trace.append(entry)
    report.n_cases = len(report.trace)

    final = report.trace[-1]["ratio"]
    deviation = abs(final - limit)
    if case_id == "thm13i-upper":
        deviation /= limit
    mono_ok, bad_step = final_decade_monotone(report.trace, limit)
    anchor = {"name": case_id, "description": case.description, "claimed_limit": limit,
              "final_parameter": report.trace[-1]["parameter"], "final_ratio": final,
              "deviation": deviation, "tolerance": case.tolerance,
              "extrapolated_limit": _extrapolate(case_id, report.trace),
              "final_decade_monotone": mono_ok, "passed": deviation <= case.tolerance and mono_ok}
    report.anchors.append(anchor)
    report.sharpest_ratio = final
    report.worst_margin = case.tolerance - deviation
    if deviation > case.tolerance:
        report.n_violations += 1
        report.witnesses.append({"check": "final ratio", **report.trace[-1]})
    if not mono_ok:
        report.n_violations += 1
        report.witnesses.append({"check": "final-decade monotonicity", "step": bad_step,
                                 **report.trace[bad_step]})
    if case_id == "thm15iii":
        report.notes.append("delta^p at the witness follows log(1 + 2^(1/p+2) eps/(1+eps^2)) by "
                            "enumeration over {-e1, e1, inf}; the square-root denominator differs "
                            "at order eps^3; the limit ratio 2 is unaffected")
        report.anchors.append({"name": "witness closed forms", **witness_closed_forms(report.trace[-1]["parameter"], p)})
    if case_id == "thm15-lower":
        report.notes.append("tests j^q/j^p -> 1; j^p/log|x| tends to 1 under direct evaluation")
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report
