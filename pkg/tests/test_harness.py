import json
import math

import numpy as np
import pytest

from relmetrics import metrics as M
from relmetrics.domains import domain_from_dict
from relmetrics.extended_space import arch, point_from_json
from relmetrics.harness import suites as S
from relmetrics.harness.generators import (
    BatchSet,
    Case,
    GenerationError,
    GeneratorParams,
    case_rng,
    derive_seed,
    generate_case,
    separation_ok,
)
from relmetrics.harness.report import Tally, VerificationReport, jsonable
from relmetrics.harness.sharpness import CASES, final_decade_monotone, sharpness_sweep, witness_closed_forms


class TestGenerators:
    def test_replayable_per_case(self):
        a = generate_case(3, 17, 3)
        b = generate_case(3, 17, 3)
        assert np.array_equal(a.boundary, b.boundary) and np.array_equal(a.pts, b.pts)
        assert not np.array_equal(generate_case(3, 18, 3).pts, a.pts)

    def test_rng_streams_independent(self):
        assert case_rng(1, 0).random() != case_rng(1, 1).random()
        assert derive_seed(1, 2) == derive_seed(1, 2) != derive_seed(1, 3)

    @pytest.mark.parametrize("eu", [True, False])
    def test_shape_and_flags(self, eu):
        for i in range(50):
            c = generate_case(0, i, 2, n_points=3, euclidean=eu)
            assert c.euclidean == eu and 2 <= c.m <= 6 and len(c.pts) == 3
            assert c.binf.sum() == (1 if eu else 0)
            assert not (eu and c.pinf.any())
            assert separation_ok(c.boundary, c.binf, c.pts, c.pinf, 1e-4)
            assert np.all(np.abs(c.boundary) <= 3.0)

    def test_infinite_points_appear(self):
        cases = [generate_case(0, i, 2, euclidean=False) for i in range(300)]
        assert any(c.pinf.any() for c in cases)

    def test_generation_failure(self):
        params = GeneratorParams(box=1e-3, min_separation=0.5, max_retries=5)
        with pytest.raises(GenerationError):
            generate_case(0, 0, 2, params=params)

    def test_case_round_trip(self):
        c = generate_case(4, 2, 2, euclidean=True)
        d = c.to_dict()
        g = domain_from_dict(d["domain"])
        pts = [point_from_json(p) for p in d["points"]]
        c2 = Case.from_points(c.index, list(g.points), pts, 2)
        assert BatchSet([c2]).metric("rho")[0] == BatchSet([c]).metric("rho")[0]
        assert M.rho(g, *pts).value == pytest.approx(BatchSet([c]).metric("rho")[0], rel=1e-14)


class TestConfig:
    def test_sharp_constants(self):
        assert S.SHARP.c_13i == pytest.approx(1.60452, abs=1e-5)
        assert S.SHARP.c_13ii == pytest.approx(2.54311, abs=1e-5)
        assert S.SHARP.c_13i == arch(3.0) / math.log(3.0)
        assert S.SharpConstants.c_15(math.inf, 1.0) == 2.0
        assert S.SharpConstants.c_15(2.0, 1.0) == pytest.approx(math.sqrt(2))

    def test_defaults(self):
        cfg = S.SuiteConfig("thm13")
        assert cfg.samples == 10_000 and cfg.tolerance == 1e-12
        assert S.SuiteConfig("axioms").samples == 100_000

    @pytest.mark.parametrize("kw", [{"exponent_pairs": ((1.0, 2.0),)}, {"chain3_exponents": (0.5,)},
                                    {"dim": 1}, {"dim": 17}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            S.SuiteConfig("thm15", **kw)

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            S.run_suite("thm99")


class TestReport:
    def test_tally_relative(self):
        t = Tally("x", 1e-12)
        bad = t.add([1.0, 2.0, 3.0], [1.0, 2.5, 2.0])
        assert bad.tolist() == [2] and t.n_violations == 1 and t.n_checked == 3
        assert t.worst_margin == pytest.approx(-0.5) and t.max_ratio == pytest.approx(1.5)

    def test_tally_absolute(self):
        t = Tally("x", 0.1, relative=False)
        assert t.add([1.05], [1.0]).size == 0 and t.add([1.2], [1.0]).size == 1

    def test_jsonable(self):
        assert jsonable({"a": math.inf, "b": [np.float64(1.5), np.int64(2), np.bool_(True)], "c": math.nan}) == \
            {"a": "inf", "b": [1.5, 2, True], "c": "nan"}

    def test_round_trip(self, tmp_path):
        r = S.run_suite("thm13", samples=50, seed=1)
        path = tmp_path / "r.json"
        r.write(path)
        d = json.loads(path.read_text())
        assert {"suite", "seed", "dimension", "n_cases", "n_violations", "worst_margin",
                "sharpest_ratio", "witnesses", "runtime_ms"} <= set(d)
        r2 = VerificationReport.from_dict(d)
        assert r2.to_json() == r.to_json()

    @pytest.mark.parametrize("suite", ["thm13", "thm15", "axioms", "invariance", "monotonicity", "bound-probe"])
    def test_deterministic(self, suite):
        kw = {"samples": 40, "seed": 9}
        if suite == "invariance":
            kw.update(samples=10, n_maps=5, cross_ratio_samples=100)
        a = S.run_suite(suite, **kw).to_json(include_runtime=False)
        b = S.run_suite(suite, **kw).to_json(include_runtime=False)
        assert a == b


class TestSuitesSmall:
    @pytest.mark.parametrize("dim", [2, 3])
    def test_assertion_suites_pass(self, dim):
        for suite, kw in [("thm13", {"samples": 500}), ("thm15", {"samples": 500}),
                          ("axioms", {"samples": 500}), ("monotonicity", {"samples": 100}),
                          ("invariance", {"samples": 20, "n_maps": 10, "cross_ratio_samples": 500})]:
            r = S.run_suite(suite, dim=dim, seed=2, **kw)
            assert r.passed and r.n_violations == 0, r.summary()

    def test_oracle_small(self):
        r = S.run_suite("oracle", samples=5, seed=0)
        assert r.passed and r.n_cases == 10

    def test_anchors(self):
        a = S.rho_delta_anchor(3)
        assert a["relative_deviation"] < 1e-15
        b = S.rho_j_anchor(2)
        assert abs(b["ratio"] - 1.0) < 1e-10

    def test_violations_are_replayable(self, monkeypatch):
        # shrink the constant below its sharp value: the suite must fail and
        # every witness must reproduce the violation on its own
        monkeypatch.setattr(S, "SHARP", S.SharpConstants(c_13i=1.2, c_13ii=S.SHARP.c_13ii))
        r = S.run_suite("thm13", samples=300, seed=4)
        assert not r.passed
        bad = [w for w in r.witnesses if w["check"].startswith("rho-delta upper")]
        assert len(bad) == r.checks["rho-delta upper: rho <= c13i*delta"]["n_violations"] > 0
        for w in bad:
            g = domain_from_dict(w["domain"])
            x, y = (point_from_json(p) for p in w["points"])
            assert M.rho(g, x, y).value > 1.2 * M.delta(g, x, y).value

    def test_probe_never_fails(self):
        r = S.run_suite("bound-probe", samples=100, seed=3)
        assert r.probe and r.passed and r.n_violations > 0
        assert r.anchors[0]["violated"]

    def test_small_p_probe(self):
        r = S.run_suite("small-p-probe", samples=200, seed=0, probe_exponents=(0.25, 0.5))
        assert r.probe and r.passed and len(r.checks) == 4

    def test_invariance_skips_are_counted(self):
        r = S.run_suite("invariance", samples=50, n_maps=20, cross_ratio_samples=10, seed=0)
        assert r.n_cases + r.n_skipped == 50 * 20


class TestSharpness:
    @pytest.mark.parametrize("case", sorted(set(CASES) - {"thm13ii-lower"}))
    def test_cases_pass(self, case):
        r = sharpness_sweep(case)
        assert r.passed, r.anchors
        assert len(r.trace) == r.n_cases >= 1

    def test_rho_j_sweep_short(self):
        r = sharpness_sweep("thm13ii-lower", resolution=1)
        assert r.passed and abs(r.anchors[0]["final_ratio"] - 1.0) < 1e-10

    @pytest.mark.parametrize("p, q", [(2.0, 1.0), (math.inf, 2.0), (4.0, 0.5)])
    def test_upper_15_pairs(self, p, q):
        r = sharpness_sweep("thm15-upper", p=p, q=q)
        assert r.passed and abs(r.anchors[0]["final_ratio"] - 2 ** (1 / q - 1 / p)) < 1e-5

    def test_errors(self):
        with pytest.raises(ValueError):
            sharpness_sweep("thm16")
        with pytest.raises(ValueError):
            sharpness_sweep("thm15-upper", p=1.0, q=2.0)
        with pytest.raises(ValueError):
            sharpness_sweep("thm15iii", p=0.5)

    def test_witness_closed_forms(self):
        for eps in (1e-1, 1e-2, 1e-3):
            f = witness_closed_forms(eps, 1.0)
            assert f["brute_force"] == pytest.approx(f["denominator_1_plus_eps2"], rel=1e-13)
            assert f["sqrt_denominator"] != pytest.approx(f["brute_force"], rel=1e-13)

    def test_monotone_check(self):
        mk = lambda vals: [{"parameter": 10.0 ** -k, "ratio": v} for k, v in enumerate(vals)]
        assert final_decade_monotone(mk([1.5, 1.9, 1.99]), 2.0)[0]
        ok, k = final_decade_monotone(mk([1.5, 1.99, 1.9]), 2.0)
        assert not ok and k == 2
