import json
import math

import numpy as np
import pytest

from relmetrics.domains import (
    EXHAUSTIVE,
    GRID_REFINE,
    Ball,
    BoundaryCloud,
    BoundaryObjective,
    FiniteComplement,
    HalfSpace,
    SupremumStrategy,
    boundary_spherical_diameter,
    contains,
    default_strategy,
    distance_to_boundary,
    domain_from_dict,
    domain_to_dict,
    dumps_domain,
    load_domain,
    loads_domain,
    on_boundary,
    punctured,
    require_member,
    sup_over_boundary,
    sup_over_boundary_pairs,
    unit_ball,
    upper_half_space,
)
from relmetrics.extended_space import INF, basis, chordal_distance, origin, point


class TestConstruction:
    def test_euclidean_subset_adds_infinity_once(self):
        g = FiniteComplement((point(1, 0), point(-1, 0)), euclidean_subset=True)
        assert g.points.count(INF) == 1 and len(g.points) == 3
        g2 = FiniteComplement((point(1, 0), INF), euclidean_subset=True)
        assert g2.points.count(INF) == 1

    def test_infinity_in_list_marks_euclidean(self):
        assert FiniteComplement((origin(2), INF)).euclidean_subset

    @pytest.mark.parametrize("pts", [(origin(2),), (origin(2), origin(2)), (INF, INF, origin(2)),
                                     (INF,), (origin(2), origin(3))])
    def test_invalid_boundaries(self, pts):
        with pytest.raises(ValueError):
            FiniteComplement(pts)

    def test_needs_two_points_after_normalization(self):
        assert len(punctured(origin(2)).points) == 2
        with pytest.raises(ValueError):
            FiniteComplement((origin(2),), euclidean_subset=False)

    def test_ball_and_half_space_validation(self):
        with pytest.raises(ValueError):
            Ball(origin(2), 0.0)
        with pytest.raises(ValueError):
            Ball(INF, 1.0)
        with pytest.raises(ValueError):
            HalfSpace((1.0, 1.0), 0.0)
        assert upper_half_space(3).normal == (0.0, 0.0, 1.0)
        assert unit_ball(4).dim == 4


class TestMembership:
    def test_finite_complement(self):
        g = punctured(origin(2))
        assert contains(g, point(1, 0)) and not contains(g, INF) and on_boundary(g, INF)
        g2 = FiniteComplement((origin(2), point(1, 0)))
        assert contains(g2, INF)

    def test_ball(self):
        g = unit_ball(2)
        assert contains(g, point(0.5, 0)) and not contains(g, point(2, 0))
        assert on_boundary(g, point(1, 0)) and not contains(g, INF)

    def test_half_space(self):
        g = upper_half_space(2)
        assert contains(g, point(0, 1)) and on_boundary(g, point(3, 0)) and on_boundary(g, INF)

    @pytest.mark.parametrize("x, msg", [(origin(2), "x is a boundary point"), (INF, "x is a boundary point")])
    def test_require_member_messages(self, x, msg):
        with pytest.raises(ValueError, match=msg):
            require_member(punctured(origin(2)), x)

    def test_require_member_outside(self):
        with pytest.raises(ValueError, match="x is not in G"):
            require_member(unit_ball(2), point(3, 0))
        with pytest.raises(ValueError, match="dimension"):
            require_member(unit_ball(2), point(0, 0, 0))

    def test_distance_to_boundary(self):
        g = punctured(point(1, 0), point(-1, 0))
        assert distance_to_boundary(g, point(0, 2)) == pytest.approx(math.sqrt(5))
        assert distance_to_boundary(unit_ball(2), point(0.25, 0)) == 0.75
        assert distance_to_boundary(upper_half_space(2), point(7, 0.5)) == 0.5
        with pytest.raises(ValueError):
            distance_to_boundary(FiniteComplement((origin(2), point(1, 0))), point(3, 3))
        with pytest.raises(ValueError):
            distance_to_boundary(punctured(origin(2)), INF)


class TestSerialization:
    DOMAINS = [
        punctured(point(1, 0), point(-1, 0)),
        FiniteComplement((point(0.1, 1 / 3), point(1e-17, 2.0))),
        BoundaryCloud((point(1, 0), point(0, 1), INF), approximate=True),
        Ball(point(0.3, -0.7, 2.0), 1.25),
        HalfSpace((0.6, 0.8), -0.1),
    ]

    @pytest.mark.parametrize("g", DOMAINS)
    def test_round_trip_bit_exact(self, g):
        text = dumps_domain(g)
        g2 = loads_domain(text)
        assert g2 == g
        assert dumps_domain(g2) == text

    def test_spec_file_example(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text('{"variant":"finite_complement","points":[[1,0],[-1,0],"inf"],"euclidean_subset":true}')
        g = load_domain(path)
        assert g == punctured(point(1, 0), point(-1, 0))

    @pytest.mark.parametrize("d", [{"variant": "torus"}, {"points": []}, {"variant": "ball", "center": [0, 0]}])
    def test_bad_specs(self, d):
        with pytest.raises((ValueError, KeyError, TypeError)):
            domain_from_dict(d)

    def test_dict_form(self):
        d = domain_to_dict(unit_ball(2))
        assert d["variant"] == "ball" and json.loads(json.dumps(d)) == d


class TestSupremum:
    def test_strategy_validation(self):
        with pytest.raises(ValueError):
            SupremumStrategy("random")
        with pytest.raises(ValueError):
            SupremumStrategy("grid_refine", refine_tolerance=0.0)
        assert default_strategy(unit_ball(2)) == GRID_REFINE
        assert default_strategy(punctured(origin(2))) == EXHAUSTIVE

    def test_strategy_variant_mismatch(self):
        obj = BoundaryObjective(lambda a: 0.0)
        with pytest.raises(ValueError):
            sup_over_boundary(unit_ball(2), obj, EXHAUSTIVE)
        with pytest.raises(ValueError):
            sup_over_boundary(punctured(origin(2)), obj, GRID_REFINE)

    def test_exhaustive_ties_go_to_first(self):
        g = punctured(point(1, 0), point(-1, 0))
        v, w = sup_over_boundary(g, BoundaryObjective(lambda a: 1.0))
        assert v == 1.0 and w == point(1, 0)
        v, (a, b) = sup_over_boundary_pairs(g, BoundaryObjective(lambda a, b: 1.0))
        assert (a, b) == (point(1, 0), point(-1, 0))

    @pytest.mark.parametrize("n", [2, 3])
    def test_grid_refine_finds_farthest_point(self, n):
        target = np.full(n, 1.0 / math.sqrt(n))
        obj = BoundaryObjective(lambda a: -math.dist(a.coords, tuple(target)))
        v, w = sup_over_boundary(unit_ball(n), obj)
        assert abs(v) < 1e-8 and math.dist(w.coords, tuple(target)) < 1e-8

    def test_half_space_grid_includes_infinity(self):
        obj = BoundaryObjective(lambda a: 1.0 if a.is_inf else 0.0)
        v, w = sup_over_boundary(upper_half_space(2), obj)
        assert v == 1.0 and w == INF

    def test_spherical_diameter(self):
        assert boundary_spherical_diameter(punctured(origin(2))) == 1.0
        d = boundary_spherical_diameter(unit_ball(2))
        assert d == pytest.approx(chordal_distance(point(1, 0), point(-1, 0)), rel=1e-9)


@pytest.mark.parametrize("seed", range(50))
def test_grid_refine_matches_dense_sampling(seed):
    """Single-point objectives on the unit disk / upper half-plane against 10^5 boundary samples."""
    from relmetrics.domains import _SphereChart
    from relmetrics.metrics import j_objective, pointed_objective

    rng = np.random.default_rng(seed)
    if seed % 2:
        g = unit_ball(2)
        x, y = (point(*(rng.uniform(-0.6, 0.6, 2))) for _ in range(2))
    else:
        g = upper_half_space(2)
        x, y = (point(rng.uniform(-2, 2), rng.uniform(0.2, 2)) for _ in range(2))
    chart = _SphereChart(g)
    if seed % 4 < 2:
        obj = j_objective(x, y, 2, float(rng.choice([1.0, 2.0, math.inf])))
    else:
        b = chart.point(np.array([rng.uniform(0, 2 * math.pi)]))
        obj = pointed_objective(x, y, b, 2, float(rng.choice([1.0, math.inf])))
    params = (2 * np.pi * np.arange(100_000) / 100_000)[:, None]
    dense = np.max(obj.batch(*chart.points(params)))
    value, _ = sup_over_boundary(g, obj)
    assert abs(value - dense) <= 1e-6 * max(1.0, abs(dense))
