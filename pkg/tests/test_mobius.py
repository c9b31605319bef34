import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from relmetrics.domains import Ball, FiniteComplement, HalfSpace, contains, on_boundary, punctured, unit_ball, upper_half_space
from relmetrics.extended_space import INF, ExtendedPoint, basis, chordal_distance, cross_ratio, origin, point
from relmetrics.mobius import (
    Inversion,
    MobiusMap,
    Reflection,
    Rotation,
    Scaling,
    Translation,
    apply,
    apply_domain,
    compose,
    inverse,
    max_chordal_deviation,
    random_mobius,
)

from strategies import extended_points


def sample_points(n, k, seed=0):
    rng = np.random.default_rng(seed)
    return [ExtendedPoint(tuple(rng.uniform(-3, 3, n))) for _ in range(k)] + [INF]


class TestPrimitives:
    def test_inversion_swaps_center_and_infinity(self):
        inv = Inversion((1.0, 0.0), 2.0)
        assert inv(point(1, 0)) == INF
        assert inv(INF) == point(1, 0)
        assert inv(point(3, 0)) == point(3, 0)  # fixed on the sphere
        assert inv(point(2, 0)) == point(5, 0)

    def test_reflection(self):
        r = Reflection((0.0, 1.0), 1.0)
        assert r(point(3, 0)) == point(3, 2)
        assert r(INF) == INF

    def test_similarities(self):
        assert Scaling(2.0)(point(1, -1)) == point(2, -2)
        assert Translation((1.0, 1.0))(point(1, -1)) == point(2, 0)
        rot = Rotation(((0.0, -1.0), (1.0, 0.0)))
        assert rot(point(1, 0)) == point(0, 1)
        assert rot.inverse()(point(0, 1)) == point(1, 0)

    @pytest.mark.parametrize("bad", [lambda: Inversion((0.0, 0.0), 0.0), lambda: Reflection((1.0, 1.0)),
                                     lambda: Scaling(0.0), lambda: Rotation(((1.0, 1.0), (0.0, 1.0)))])
    def test_rejects_bad_parameters(self, bad):
        with pytest.raises(ValueError):
            bad()

    def test_mixed_dimensions(self):
        with pytest.raises(ValueError):
            MobiusMap((Translation((1.0, 0.0)), Translation((1.0, 0.0, 0.0))))
        with pytest.raises(ValueError):
            apply(MobiusMap((Translation((1.0, 0.0)),)), origin(3))


class TestMaps:
    def test_compose_order(self):
        f = MobiusMap((Translation((1.0, 0.0)),))
        g = MobiusMap((Scaling(2.0),))
        assert apply(compose(f, g), origin(2)) == point(2, 0)
        assert apply(compose(g, f), origin(2)) == point(1, 0)

    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_inverse_round_trip(self, seed, n):
        m = random_mobius(seed, n)
        assert max_chordal_deviation(m, sample_points(n, 20, seed)) < 1e-12

    def test_random_is_deterministic(self):
        assert random_mobius(7, 3) == random_mobius(7, 3)
        assert random_mobius(7, 3).to_list() != random_mobius(8, 3).to_list()

    @pytest.mark.parametrize("seed", range(5))
    def test_serialization_round_trip(self, seed):
        m = random_mobius(seed, 3)
        assert MobiusMap.from_list(m.to_list()) == m

    def test_bad_descriptor(self):
        with pytest.raises(ValueError):
            MobiusMap.from_list([{"kind": "shear"}])

    @given(st.integers(0, 10_000), extended_points(), extended_points(), extended_points(), extended_points())
    def test_cross_ratio_invariance(self, seed, a, b, c, d):
        assume(min(chordal_distance(a, b), chordal_distance(c, d)) > 1e-2)
        assume(min(chordal_distance(a, c), chordal_distance(b, d)) > 1e-2)
        m = random_mobius(seed, 2)
        v = cross_ratio(a, b, c, d)
        w = cross_ratio(*(apply(m, t) for t in (a, b, c, d)))
        assert w == pytest.approx(v, rel=1e-9)


class TestDomainImages:
    def test_finite_complement(self):
        g = punctured(origin(2))
        h = apply_domain(MobiusMap((Inversion((0.0, 0.0), 1.0),)), g)
        assert isinstance(h, FiniteComplement) and set(h.points) == {INF, origin(2)}
        h = apply_domain(MobiusMap((Inversion((5.0, 0.0), 1.0),)), g)
        assert not h.euclidean_subset and INF not in h.points

    def test_half_space_inversion_outside(self):
        # inversion centered below the boundary plane maps H^n to a ball
        n = 3
        inv = MobiusMap((Inversion(basis(n, n, -1.0).coords, 1.0),))
        h = apply_domain(inv, upper_half_space(n))
        assert isinstance(h, Ball)
        for x in (basis(n, n), point(1, 2, 0.5), point(-3, 0, 4)):
            assert contains(h, apply(inv, x))

    def test_half_space_inversion_on_plane_is_identity(self):
        inv = MobiusMap((Inversion((0.0, 0.0), 1.0),))
        assert apply_domain(inv, upper_half_space(2)) == upper_half_space(2)

    @pytest.mark.parametrize("g", [unit_ball(2), upper_half_space(2)])
    def test_interior_center_is_unsupported(self, g):
        inv = MobiusMap((Inversion((0.0, 0.5), 1.0),))
        with pytest.raises(ValueError, match="infinity"):
            apply_domain(inv, g)

    @pytest.mark.parametrize("seed", range(30))
    def test_boundary_maps_to_boundary(self, seed):
        rng = np.random.default_rng(seed)
        n = 3
        g = Ball(point(*rng.uniform(-1, 1, n)), 0.5) if seed % 2 else HalfSpace(
            tuple(v / np.linalg.norm(v) for v in [rng.standard_normal(n)])[0], 0.3)
        m = random_mobius(seed, n)
        try:
            h = apply_domain(m, g)
        except ValueError:
            # only an inversion centered inside G can push infinity into the image
            assert any(isinstance(p, Inversion) for p in m.primitives)
            return
        # boundary and interior points go to boundary and interior points
        for _ in range(10):
            u = rng.standard_normal(n)
            u /= np.linalg.norm(u)
            if isinstance(g, Ball):
                b = ExtendedPoint(tuple(np.array(g.center.coords) + g.radius * u))
                x = ExtendedPoint(tuple(np.array(g.center.coords) + 0.5 * g.radius * u))
            else:
                t = u - np.dot(u, g.normal) * np.array(g.normal)
                b = ExtendedPoint(tuple(t + g.offset * np.array(g.normal)))
                x = ExtendedPoint(tuple(t + (g.offset + 0.7) * np.array(g.normal)))
            mb, mx = apply(m, b), apply(m, x)
            assert contains(h, mx)
            if not mb.is_inf:
                if isinstance(h, Ball):
                    err = abs(math.dist(mb.coords, h.center.coords) - h.radius)
                else:
                    err = abs(h.height(mb))
                assert err < 1e-9 * max(1.0, mb.norm())
