import math

import pytest

from relmetrics import metrics as M
from relmetrics.contour import ContourRow, ball_contour, read_contour_csv, write_contour_csv
from relmetrics.domains import FiniteComplement, punctured, unit_ball, upper_half_space
from relmetrics.extended_space import ExtendedPoint, origin, point


def test_j_half_plane_contains_2e2():
    rows = ball_contour("j", upper_half_space(2), point(0, 1), math.log(2.0), 4)
    assert len(rows) == 4
    top = rows[1]
    assert math.hypot(top.x1 - 0.0, top.x2 - 2.0) < 1e-8


def test_rho_ball_is_hyperbolic_circle():
    rows = ball_contour("rho", unit_ball(2), origin(2), math.log(3.0), 16)
    for r in rows:
        assert math.hypot(r.x1, r.x2) == pytest.approx(0.5, abs=1e-9)


def test_rows_lie_on_level_set():
    g = punctured(origin(2))
    center, r = point(1, 0), math.acosh(3.0)
    rows = ball_contour("rho", g, center, r, 12)
    assert all(row.bounded for row in rows)
    for row in rows:
        v = M.rho(g, center, ExtendedPoint((row.x1, row.x2))).value
        assert v == pytest.approx(r, abs=1e-8)


def test_ray_through_boundary_point_stops_before_it():
    # along theta = pi the ray from e1 hits 0; the first crossing lies before it
    rows = ball_contour("rho", punctured(origin(2)), point(1, 0), math.acosh(3.0), 2)
    assert rows[1].x1 == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-9)


def test_unbounded_ray():
    # without infinity on the boundary the metrics stay bounded along rays
    g = FiniteComplement((point(-1, 0), point(1, 0)))
    rows = ball_contour("rho", g, point(0, 1), 50.0, 4)
    assert not any(r.bounded for r in rows)


def test_csv_round_trip(tmp_path):
    rows = [ContourRow(0.0, 1.0, 2.0), ContourRow(1.5, math.inf, math.inf)]
    path = tmp_path / "c.csv"
    write_contour_csv(rows, path)
    assert path.read_text().splitlines()[0] == "theta,x1,x2"
    assert read_contour_csv(path) == rows


@pytest.mark.parametrize("kwargs, msg", [
    (dict(g=punctured(origin(3)), center=point(1, 0, 0)), "planar"),
    (dict(radius=0.0), "radius"),
    (dict(resolution=0), "resolution"),
    (dict(center=origin(2)), "boundary point"),
])
def test_errors(kwargs, msg):
    args = dict(g=punctured(origin(2)), center=point(1, 0), radius=1.0, resolution=4)
    args.update(kwargs)
    with pytest.raises(ValueError, match=msg):
        ball_contour("rho", args["g"], args["center"], args["radius"], args["resolution"])
