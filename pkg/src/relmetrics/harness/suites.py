"""Randomized verification suites for the metric inequalities.

Inequality suites run on finite-complement domains so that every supremum is
an exact enumeration; only the oracle suite touches balls and half-spaces.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import metrics as M
from ..domains import FiniteComplement, punctured, unit_ball, upper_half_space
from ..extended_space import (
    INF,
    ExtendedPoint,
    arch,
    basis,
    chordal_distance,
    chordal_distance_array,
    cross_ratio,
    origin,
    point_to_json,
)
from ..mobius import apply, random_mobius
from .generators import (
    BatchSet,
    Case,
    GeneratorParams,
    case_rng,
    derive_seed,
    family_label,
    generate_case,
    separation_ok,
)
from .report import Tally, VerificationReport, jsonable


@dataclass(frozen=True)
class SharpConstants:
    c_13i: float
    c_13ii: float
    c_15iii: float = 2.0

    @staticmethod
    def c_15(p: float, q: float) -> float:
        return 2.0 ** (1.0 / q - 1.0 / p)


SHARP = SharpConstants(c_13i=arch(3.0) / math.log(3.0), c_13ii=arch(3.0) / math.log(2.0))

INF_P = math.inf

DEFAULT_SAMPLES = {
    "thm13": 10_000,
    "thm15": 10_000,
    "axioms": 100_000,
    "invariance": 100,
    "monotonicity": 1_000,
    "oracle": 100,
    "bound-probe": 1_000,
}


@dataclass
class SuiteConfig:
    suite: str
    dim: int = 2
    samples: int | None = None
    seed: int = 0
    exponent_pairs: tuple = ((2.0, 1.0), (INF_P, 1.0), (INF_P, 2.0), (4.0, 0.5))
    chain3_exponents: tuple = (1.0, 2.0, INF_P)
    probe_exponents: tuple = (0.5,)
    tolerance: float = 1e-12
    triangle_tolerance: float = 1e-10
    invariance_tolerance: float = 1e-9
    cross_ratio_tolerance: float = 1e-10
    cross_ratio_samples: int = 10_000
    oracle_tolerance: float = 1e-6
    n_maps: int = 100
    max_witnesses: int = 50
    generator: GeneratorParams = field(default_factory=GeneratorParams)

    def __post_init__(self):
        if self.samples is None:
            self.samples = DEFAULT_SAMPLES.get(self.suite, 1_000)
        if not 2 <= self.dim <= 16:
            raise ValueError("dimension must be in [2, 16]")
        for p, q in self.exponent_pairs:
            if not 0 < q <= p:
                raise ValueError(f"exponent pair (p={p}, q={q}) needs 0 < q <= p")
        for p in self.chain3_exponents:
            if p < 1:
                raise ValueError("exponents asserted for delta^p <= 2 j^p must be >= 1")

    def to_dict(self) -> dict:
        return jsonable(asdict(self))


def _case_witness(case: Case, check: str, **extra) -> dict:
    d = {"check": check}
    d.update(case.to_dict())
    d.update({k: float(v) for k, v in extra.items()})
    return d


def _record(report: VerificationReport, tally: Tally, bad, cases, lhs, rhs, cfg: SuiteConfig):
    """Attach violation witnesses; every asserted violation is kept, probes are capped."""
    for k in bad:
        if not tally.asserted and len(report.witnesses) >= cfg.max_witnesses:
            break
        report.witnesses.append(_case_witness(cases[k], tally.name, lhs=lhs[k], rhs=rhs[k]))


def _check(report, tallies, name, cases, lhs, rhs, cfg, tol=None, asserted=True, relative=True):
    tally = next((t for t in tallies if t.name == name), None)
    if tally is None:
        tally = Tally(name, cfg.tolerance if tol is None else tol, relative, asserted)
        tallies.append(tally)
    bad = tally.add(lhs, rhs)
    _record(report, tally, bad, cases, lhs, rhs, cfg)
    return tally


def _generate(cfg: SuiteConfig, n_points: int, euclidean=None, card_min=None) -> list[Case]:
    return [generate_case(cfg.seed, i, cfg.dim, n_points, euclidean, cfg.generator, card_min)
            for i in range(cfg.samples)]


def _finish(report: VerificationReport, tallies, t0):
    report.absorb(tallies)
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report


def _p_label(p: float) -> str:
    return "inf" if math.isinf(p) else repr(p)


# -- rho versus delta and j -------------------------------------------------------------

def rho_delta_anchor(n: int) -> dict:
    """rho/delta on R^n minus 0 at x = e1, y = -e1, where the upper bound is attained."""
    g = punctured(origin(n))
    x, y = basis(1, n), basis(1, n, -1.0)
    r = M.rho(g, x, y).value
    d = M.delta(g, x, y).value
    ratio = r / d
    return {"name": "thm13i-upper", "domain": "R^n minus {0}", "x": point_to_json(x),
            "y": point_to_json(y), "rho": r, "delta": d, "ratio": ratio,
            "claimed": SHARP.c_13i, "relative_deviation": abs(ratio - SHARP.c_13i) / SHARP.c_13i}


def rho_j_anchor(n: int) -> dict:
    """rho/j on the upper half-space at x = e_n, y = e * e_n (both equal 1)."""
    g = upper_half_space(n)
    x, y = basis(n, n), basis(n, n, math.e)
    r = M.rho(g, x, y).value
    j = M.j_classic(g, x, y).value
    return {"name": "thm13ii-lower", "domain": "H^n", "x": point_to_json(x),
            "y": point_to_json(y), "rho": r, "j": j, "ratio": r / j, "claimed": 1.0,
            "relative_deviation": abs(r / j - 1.0)}


def check_rho_bounds(cfg: SuiteConfig) -> VerificationReport:
    """delta <= rho <= (arch 3 / log 3) delta, and j <= rho <= (arch 3 / log 2) j on G in R^n."""
    t0 = time.perf_counter()
    report = VerificationReport("thm13", cfg.seed, cfg.dim, config=cfg.to_dict())
    cases = _generate(cfg, 2)
    report.n_cases = len(cases)
    tallies: list[Tally] = []

    bs = BatchSet(cases)
    rho, dlt = bs.metric("rho"), bs.metric("delta")
    _check(report, tallies, "rho-delta lower: delta <= rho", cases, dlt, rho, cfg)
    _check(report, tallies, "rho-delta upper: rho <= c13i*delta", cases, rho, SHARP.c_13i * dlt, cfg)

    eu = [k for k, c in enumerate(cases) if c.euclidean]
    if eu:
        ecases = [cases[k] for k in eu]
        j = BatchSet(ecases).metric("j")
        r = rho[eu]
        _check(report, tallies, "rho-j lower: j <= rho", ecases, j, r, cfg)
        _check(report, tallies, "rho-j upper: rho <= c13ii*j", ecases, r, SHARP.c_13ii * j, cfg)

    for anchor, tol in ((rho_delta_anchor(cfg.dim), cfg.tolerance), (rho_j_anchor(cfg.dim), 1e-10)):
        anchor["passed"] = anchor["relative_deviation"] <= tol
        report.anchors.append(anchor)
        if not anchor["passed"]:
            report.witnesses.append({"check": f"anchor {anchor['name']}", **anchor})
    report.absorb(tallies)
    report.n_violations += sum(not a["passed"] for a in report.anchors)
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report


# -- p-family chains ------------------------------------------------------------------

def check_p_family_chains(cfg: SuiteConfig) -> VerificationReport:
    """Chains (i) delta^p <= delta^q <= 2^(1/q-1/p) delta^p, (ii) the same for j^p,
    and (iii) j^p <= delta^p <= 2 j^p for p >= 1; (iii) for p < 1 is probed only."""
    t0 = time.perf_counter()
    report = VerificationReport("thm15", cfg.seed, cfg.dim, config=cfg.to_dict())
    cases = _generate(cfg, 2)
    report.n_cases = len(cases)
    tallies: list[Tally] = []

    eu = [k for k, c in enumerate(cases) if c.euclidean]
    ecases = [cases[k] for k in eu]
    bs, ebs = BatchSet(cases), BatchSet(ecases)
    exps = sorted({e for pq in cfg.exponent_pairs for e in pq}
                  | set(cfg.chain3_exponents) | set(cfg.probe_exponents))
    dp = {p: bs.metric("delta_p", p) for p in exps}
    jp = {p: ebs.metric("j_p", p) for p in exps} if ecases else {}

    for p, q in cfg.exponent_pairs:
        c = SHARP.c_15(p, q)
        tag = f"[p={_p_label(p)},q={_p_label(q)}]"
        _check(report, tallies, f"delta-chain lower{tag}: delta^p <= delta^q", cases, dp[p], dp[q], cfg)
        _check(report, tallies, f"delta-chain upper{tag}: delta^q <= c*delta^p", cases, dp[q], c * dp[p], cfg)
        if ecases:
            _check(report, tallies, f"j-chain lower{tag}: j^p <= j^q", ecases, jp[p], jp[q], cfg)
            _check(report, tallies, f"j-chain upper{tag}: j^q <= c*j^p", ecases, jp[q], c * jp[p], cfg)
    if ecases:
        for p, asserted in [(p, True) for p in cfg.chain3_exponents] + \
                           [(p, False) for p in cfg.probe_exponents]:
            tag = f"[p={_p_label(p)}]" + ("" if asserted else " (probe)")
            d = dp[p][eu]
            _check(report, tallies, f"delta-j lower{tag}: j^p <= delta^p", ecases, jp[p], d, cfg,
                   asserted=asserted)
            _check(report, tallies, f"delta-j upper{tag}: delta^p <= 2*j^p", ecases, d,
                   SHARP.c_15iii * jp[p], cfg, asserted=asserted)

    g = punctured(origin(cfg.dim))
    x, y = basis(1, cfg.dim), basis(1, cfg.dim, -1.0)
    d1 = M.delta_p(g, x, y, 1.0).value
    dinf = M.delta_p(g, x, y, INF_P).value
    report.anchors.append({"name": "delta chain (p,q)=(inf,1) at x=e1, y=-e1 in R^n minus {0}",
                           "delta_1": d1, "delta_inf": dinf, "bound": 2.0 * dinf,
                           "passed": d1 <= 2.0 * dinf * (1 + cfg.tolerance)})
    return _finish(report, tallies, t0)


def small_p_probe(cfg: SuiteConfig) -> VerificationReport:
    """Tally delta^p <= 2 j^p for the exponents below 1, never failing."""
    t0 = time.perf_counter()
    report = VerificationReport("small-p-probe", cfg.seed, cfg.dim, config=cfg.to_dict(), probe=True)
    cases = _generate(cfg, 2, euclidean=True)
    report.n_cases = len(cases)
    bs = BatchSet(cases)
    tallies: list[Tally] = []
    for p in cfg.probe_exponents:
        d, j = bs.metric("delta_p", p), bs.metric("j_p", p)
        _check(report, tallies, f"delta-j upper[p={_p_label(p)}]: delta^p <= 2*j^p", cases, d, 2.0 * j,
               cfg, asserted=False)
        _check(report, tallies, f"delta-j lower[p={_p_label(p)}]: j^p <= delta^p", cases, j, d,
               cfg, asserted=False)
    return _finish(report, tallies, t0)


# -- metric axioms ----------------------------------------------------------------

AXIOM_FAMILIES = (("rho", None), ("delta", None), ("delta_p", 1.0), ("delta_p", 2.0),
                  ("j", None), ("j_p", 1.0), ("j_p", 2.0))


def metric_axiom_suite(cfg: SuiteConfig, families=AXIOM_FAMILIES) -> VerificationReport:
    """Symmetry (exact), positivity, and the triangle inequality on random triples.

    Each family sees ``samples`` triples; the j families use Euclidean domains.
    """
    t0 = time.perf_counter()
    report = VerificationReport("axioms", cfg.seed, cfg.dim, config=cfg.to_dict())
    cases = _generate(cfg, 3)
    # the j families need Euclidean domains: they get their own full-size sample
    ecases = [generate_case(derive_seed(cfg.seed, 5), i, cfg.dim, 3, True, cfg.generator)
              for i in range(cfg.samples)] if any(f.startswith("j") for f, _ in families) else []
    report.n_cases = len(cases) + len(ecases)
    tallies: list[Tally] = []

    pairs = ((0, 1), (1, 2), (0, 2), (1, 0))
    batches = {False: {ij: BatchSet(cases, *ij) for ij in pairs},
               True: {ij: BatchSet(ecases, *ij) for ij in pairs} if ecases else None}
    for family, p in families:
        euclid = family.startswith("j")
        sub = ecases if euclid else cases
        if not sub:
            continue
        label = family_label(family, p)
        d = {ij: bs.metric(family, p) for ij, bs in batches[euclid].items()}
        xy, yz, xz = d[0, 1], d[1, 2], d[0, 2]
        _check(report, tallies, f"symmetry {label}", sub, np.abs(xy - d[1, 0]),
               np.zeros_like(xy), cfg, tol=0.0, relative=False)
        _check(report, tallies, f"positivity {label}", sub, np.zeros_like(xy), xy, cfg, tol=0.0,
               relative=False)
        tri = f"triangle {label}"
        _check(report, tallies, tri, sub, xz, xy + yz, cfg, tol=cfg.triangle_tolerance, relative=False)
        _check(report, tallies, tri, sub, xy, xz + yz, cfg, tol=cfg.triangle_tolerance, relative=False)
        _check(report, tallies, tri, sub, yz, xy + xz, cfg, tol=cfg.triangle_tolerance, relative=False)
    report.notes.append("triangle margins are absolute; symmetry is checked bit-exactly")
    return _finish(report, tallies, t0)


# -- Moebius invariance -------------------------------------------------------------

INVARIANT_FAMILIES = (("rho", None), ("delta_p", 1.0), ("delta_p", 2.0), ("delta_p", INF_P))


def _map_case(case: Case, m, index: int, n: int) -> Case:
    boundary = [apply(m, b) for b in case.boundary_points()]
    pts = [apply(m, case.point(i)) for i in range(len(case.pts))]
    return Case.from_points(index, boundary, pts, n)


def _random_quadruple(rng, n: int, box: float):
    pts = []
    for _ in range(4):
        if rng.random() < 0.1:
            pts.append(INF)
        else:
            pts.append(ExtendedPoint(tuple(rng.uniform(-box, box, n))))
    return pts


def invariance_suite(cfg: SuiteConfig) -> VerificationReport:
    """rho and delta^p under seeded random Moebius maps, plus cross-ratio invariance.

    Mapped configurations whose chordal separation falls below the generator
    threshold are skipped (ill-conditioned, not incorrect) and counted.
    """
    t0 = time.perf_counter()
    report = VerificationReport("invariance", cfg.seed, cfg.dim, config=cfg.to_dict())
    n = cfg.dim
    maps = [random_mobius(derive_seed(cfg.seed, 1, k), n) for k in range(cfg.n_maps)]
    base = _generate(cfg, 2)
    tallies: list[Tally] = []

    orig, mapped, map_ids = [], [], []
    for k, m in enumerate(maps):
        for case in base:
            mc = _map_case(case, m, len(mapped), n)
            if not separation_ok(mc.boundary, mc.binf, mc.pts, mc.pinf, cfg.generator.min_separation):
                report.n_skipped += 1
                continue
            orig.append(case)
            mapped.append(mc)
            map_ids.append(k)
    report.n_cases = len(mapped)

    obs, mbs = BatchSet(orig), BatchSet(mapped)
    for family, p in INVARIANT_FAMILIES:
        a, b = obs.metric(family, p), mbs.metric(family, p)
        dev = np.abs(b - a) / np.maximum(np.abs(a), 1e-300)
        name = f"invariance {family_label(family, p)}"
        tally = _check(report, tallies, name, mapped, dev, np.zeros_like(dev), cfg,
                       tol=cfg.invariance_tolerance, relative=False)
        for w in report.witnesses:
            if w["check"] == name and "map" not in w:
                w["map"] = maps[map_ids[w["case_index"]]].to_list()
                w["original"] = orig[w["case_index"]].to_dict()

    # cross-ratio invariance on random quadruples
    cr = Tally("invariance cross_ratio", cfg.cross_ratio_tolerance, relative=False)
    tallies.append(cr)
    devs = []
    for i in range(cfg.cross_ratio_samples):
        rng = case_rng(derive_seed(cfg.seed, 2), i)
        m = maps[i % len(maps)]
        while True:
            a, b, c, d = _random_quadruple(rng, n, cfg.generator.box)
            if a != b and c != d:
                break
        fa, fb, fc, fd = (apply(m, t) for t in (a, b, c, d))
        v, w = cross_ratio(a, b, c, d), cross_ratio(fa, fb, fc, fd)
        devs.append(abs(w - v) / max(abs(v), 1e-300))
    bad = cr.add(np.array(devs), np.zeros(len(devs)))
    for i in bad:
        report.witnesses.append({"check": cr.name, "sample": int(i), "deviation": devs[i]})
    return _finish(report, tallies, t0)


# -- monotonicity -----------------------------------------------------------------

MONOTONE_FAMILIES = (("rho", None), ("delta", None), ("delta_p", 1.0), ("delta_p", 0.5),
                     ("j", None), ("j_p", 1.0), ("j_p", 2.0))


def _scalar_metric(family: str, p, g, x, y) -> float:
    if family == "j":
        return M.j_classic(g, x, y).value
    return M.compute(family, g, x, y, p).value


def monotonicity_suite(cfg: SuiteConfig) -> VerificationReport:
    """Nested finite complements: removing boundary points never increases a metric.

    Values are computed by exhaustive enumeration and compared with zero tolerance.
    """
    t0 = time.perf_counter()
    report = VerificationReport("monotonicity", cfg.seed, cfg.dim, config=cfg.to_dict())
    tallies = {f: Tally(f"monotone {family_label(*f)}", 0.0, relative=False) for f in MONOTONE_FAMILIES}
    for i in range(cfg.samples):
        case = generate_case(cfg.seed, i, cfg.dim, 2, None, cfg.generator, card_min=3)
        rng = case_rng(derive_seed(cfg.seed, 3), i)
        pts = case.boundary_points()
        size = int(rng.integers(2, len(pts)))
        keep = sorted(rng.choice(len(pts), size=size, replace=False).tolist())
        if case.euclidean:
            inf_idx = int(np.flatnonzero(case.binf)[0])
            if inf_idx not in keep:
                keep[int(rng.integers(size))] = inf_idx
                keep = sorted(set(keep))
        big = case.domain()
        small = FiniteComplement(tuple(pts[k] for k in keep), euclidean_subset=case.euclidean)
        x, y = case.point(0), case.point(1)
        for (family, p), tally in tallies.items():
            if family.startswith("j") and not case.euclidean:
                continue
            vb = _scalar_metric(family, p, big, x, y)
            vs = _scalar_metric(family, p, small, x, y)
            if tally.add([vs], [vb]).size:
                report.witnesses.append({"check": tally.name, **case.to_dict(), "subset": keep,
                                         "value_big_boundary": vb, "value_sub_boundary": vs})
        report.n_cases += 1
    return _finish(report, list(tallies.values()), t0)


# -- lower-bound probe ----------------------------------------------------------------

def _probe_case(report, tallies, cfg, case, rho, dlt):
    bpts = case.boundary_points()
    qd = max(chordal_distance(a, b) for k, a in enumerate(bpts) for b in bpts[:k])
    qxy = chordal_distance(case.point(0), case.point(1))
    s = qd * qxy
    for tally, lhs, value in ((tallies[0], math.cosh(s * s) - 1.0, rho), (tallies[1], math.expm1(s), dlt)):
        if tally.add([lhs], [value]).size and len(report.witnesses) < cfg.max_witnesses:
            report.witnesses.append({"check": tally.name, **case.to_dict(), "q_boundary": qd,
                                     "q_xy": qxy, "bound": lhs, "value": value})


def bound_probe(cfg: SuiteConfig) -> VerificationReport:
    """Tally the conjectured lower bounds rho >= cosh((q(dG) q(x,y))^2) - 1 and
    delta >= exp(q(dG) q(x,y)) - 1.  Report only: never fails."""
    t0 = time.perf_counter()
    report = VerificationReport("bound-probe", cfg.seed, cfg.dim, config=cfg.to_dict(), probe=True)
    tallies = [Tally("rho >= cosh((q(dG)q(x,y))^2) - 1", 0.0, relative=False, asserted=False),
               Tally("delta >= exp(q(dG)q(x,y)) - 1", 0.0, relative=False, asserted=False)]
    n = cfg.dim
    anchor = Case.from_points(-1, [origin(n), INF], [basis(1, n), basis(1, n, -1.0)], n)
    cases = [anchor] + _generate(cfg, 2)
    bs = BatchSet(cases)
    rho, dlt = bs.metric("rho"), bs.metric("delta")
    for k, case in enumerate(cases):
        _probe_case(report, tallies, cfg, case, rho[k], dlt[k])
    report.n_cases = len(cases)
    report.anchors.append({"name": "delta bound at R^n minus {0, inf}, x=e1, y=-e1",
                           "delta": float(dlt[0]), "bound": math.e - 1.0,
                           "violated": bool(dlt[0] < math.e - 1.0),
                           "rho": float(rho[0]), "rho_bound": math.cosh(1.0) - 1.0})
    report.notes.append("probe only: these bounds are not asserted")
    return _finish(report, tallies, t0)


# -- oracle equivalence ---------------------------------------------------------------

def _ball_point(rng, n, radius=0.9):
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    return ExtendedPoint(tuple(v * radius * rng.random() ** (1.0 / n)))


def _half_point(rng, n):
    coords = list(rng.uniform(-2.0, 2.0, n - 1)) + [math.exp(rng.uniform(math.log(0.1), math.log(3.0)))]
    return ExtendedPoint(tuple(coords))


def oracle_suite(cfg: SuiteConfig, strategy=None) -> VerificationReport:
    """rho via boundary optimization against the closed-form hyperbolic distance."""
    t0 = time.perf_counter()
    report = VerificationReport("oracle", cfg.seed, cfg.dim, config=cfg.to_dict())
    n = cfg.dim
    tallies = []
    for tag, g, sampler in (("ball", unit_ball(n), _ball_point), ("half_space", upper_half_space(n), _half_point)):
        tally = Tally(f"oracle {tag}: |rho - hyperbolic|", cfg.oracle_tolerance, relative=False)
        tallies.append(tally)
        for i in range(cfg.samples):
            rng = case_rng(derive_seed(cfg.seed, 4, len(tallies)), i)
            x, y = sampler(rng, n), sampler(rng, n)
            value = M.rho(g, x, y, strategy).value
            exact = M.hyperbolic_closed_form(g, x, y)
            if tally.add([abs(value - exact)], [0.0]).size:
                report.witnesses.append({"check": tally.name, "sample": i, "x": point_to_json(x),
                                         "y": point_to_json(y), "rho": value, "closed_form": exact})
            report.n_cases += 1
    report.notes.append("continuous-boundary suprema are lower bounds found by grid search + local refinement")
    return _finish(report, tallies, t0)


SUITES = {
    "thm13": check_rho_bounds,
    "thm15": check_p_family_chains,
    "axioms": metric_axiom_suite,
    "invariance": invariance_suite,
    "monotonicity": monotonicity_suite,
    "oracle": oracle_suite,
    "bound-probe": bound_probe,
    "small-p-probe": small_p_probe,
}


def run_suite(suite: str, **kwargs) -> VerificationReport:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    return SUITES[suite](SuiteConfig(suite, **kwargs))
