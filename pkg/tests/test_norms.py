from fractions import Fraction
import json
import math

import numpy as np
import pytest

from meanharmonic.errors import DimensionMismatch, InvalidNorm
from meanharmonic.norms import NormSpec, Simplex
from meanharmonic.polycore import Polynomial


def test_gauge_examples():
    assert NormSpec.lp(1, 2).gauge((Fraction(1, 2), Fraction(1, 2))) == 1
    assert NormSpec.lp("inf", 2).gauge((0.3, -0.7)) == pytest.approx(0.7)
    assert NormSpec.lp(2, 2).gauge((3, 4)) == pytest.approx(5.0)
    assert NormSpec.lp(1, 2, scales=(2, 1)).gauge((1, 1)) == Fraction(3, 2)
    assert NormSpec.cube(2).gauge((2, 0)) == 2


@pytest.mark.parametrize(
    "norm,center,r,point,expected",
    [
        (NormSpec.lp(2, 2), (0, 0), 1, (1, 0), False),
        (NormSpec.lp(2, 2), (0, 0), 1, (Fraction(3, 5), Fraction(3, 5)), True),
        (NormSpec.lp(1, 2), (0, 0), 1, (0.4, 0.5), True),
        (NormSpec.lp(1, 2), (0, 0), 1, (Fraction(1, 2), Fraction(1, 2)), False),
        (NormSpec.lp(4, 2), (0.3, -0.2), 0.1, (0.3, -0.2), True),
        (NormSpec.lp("inf", 2), (1, 1), Fraction(1, 2), (Fraction(3, 2), 1), False),
    ],
)
def test_contains(norm, center, r, point, expected):
    assert norm.contains(center, r, point) is expected


def test_contains_rejects_bad_radius():
    with pytest.raises(ValueError):
        NormSpec.lp(2, 2).contains((0, 0), 0, (0, 0))
    with pytest.raises(DimensionMismatch):
        NormSpec.lp(2, 2).contains((0, 0), 1, (0, 0, 0))


def test_polytopes_match_lp_gauges__seeded():
    rng = np.random.default_rng(7)
    square, diamond = NormSpec.cube(2), NormSpec.cross_polytope(2)
    l_inf, l_1 = NormSpec.lp("inf", 2), NormSpec.lp(1, 2)
    for _ in range(100):
        point = tuple(Fraction(int(k), 97) for k in rng.integers(-300, 300, size=2))
        assert square.gauge(point) == l_inf.gauge(point)
        assert diamond.gauge(point) == l_1.gauge(point)


@pytest.mark.parametrize("p", [1, Fraction(3, 2), 3, 4, math.inf])
def test_norm_axioms__seeded(p):
    rng = np.random.default_rng(11)
    norm = NormSpec.lp(p, 3)
    for _ in range(50):
        x, y = rng.normal(size=3), rng.normal(size=3)
        gx, gy = norm.gauge(tuple(x)), norm.gauge(tuple(y))
        assert norm.gauge(tuple(-x)) == pytest.approx(gx)
        assert norm.gauge(tuple(x + y)) <= gx + gy + 1e-12
        assert norm.gauge(tuple(2.5 * x)) == pytest.approx(2.5 * gx)


def test_gauge_many_matches_gauge():
    rng = np.random.default_rng(3)
    points = rng.uniform(-1, 1, size=(20, 2))
    for norm in (NormSpec.lp(3, 2), NormSpec.lp("inf", 2), NormSpec.hexagon()):
        values = norm.gauge_many(points)
        for point, value in zip(points, values):
            assert value == pytest.approx(norm.gauge(tuple(point)))


@pytest.mark.parametrize(
    "norm,count,volume",
    [
        (NormSpec.cross_polytope(2), 4, Fraction(2)),
        (NormSpec.cube(2), 4, Fraction(4)),
        (NormSpec.cross_polytope(3), 8, Fraction(4, 3)),
        (NormSpec.cube(3), 12, Fraction(8)),
        (NormSpec.hexagon(), 6, Fraction(3)),
    ],
)
def test_triangulation(norm, count, volume):
    simplices = norm.triangulate()
    assert len(simplices) == count
    assert norm.volume_exact == volume
    assert sum((s.volume for s in simplices), Fraction(0)) == volume


def test_simplex_integration():
    triangle = Simplex([(0, 0), (1, 0), (0, 1)])
    assert triangle.volume == Fraction(1, 2)
    assert triangle.integrate(Polynomial.constant(2, 1)) == Fraction(1, 2)
    assert triangle.integrate(Polynomial.parse("x", 2)) == Fraction(1, 6)
    assert triangle.integrate(Polynomial.parse("x*y", 2)) == Fraction(1, 24)


@pytest.mark.parametrize(
    "vertices",
    [
        [(1, 0), (0, 1), (-1, -1)],
        [(1, 0), (-1, 0)],
        [(1, 0, 0), (0, 1)],
    ],
)
def test_invalid_polytopes(vertices):
    with pytest.raises(InvalidNorm):
        NormSpec.polytope(vertices)


@pytest.mark.parametrize("p", [0, Fraction(1, 2), "abc"])
def test_invalid_exponent(p):
    with pytest.raises(InvalidNorm):
        NormSpec.lp(p, 2)


def test_invalid_scales():
    with pytest.raises(InvalidNorm):
        NormSpec.lp(2, 2, scales=(1, 0))
    with pytest.raises(InvalidNorm):
        NormSpec.lp(2, 2, scales=(1, 2, 3))


def test_parse(tmp_path):
    assert NormSpec.parse("lp:inf", 2) == NormSpec.lp(math.inf, 2)
    assert NormSpec.parse("lp:3@1,2", 2) == NormSpec.lp(3, 2, scales=(1, 2))
    assert NormSpec.parse("lp:3/2", 3).p == Fraction(3, 2)
    path = tmp_path / "diamond.json"
    path.write_text(json.dumps({"n": 2, "vertices": [["1", "0"], ["-1", "0"], ["0", "1"], ["0", "-1"]]}))
    assert NormSpec.parse("polytope:" + str(path)) == NormSpec.cross_polytope(2)
    with pytest.raises(InvalidNorm):
        NormSpec.parse("foo:1", 2)
    with pytest.raises(InvalidNorm):
        NormSpec.parse("polytope:" + str(tmp_path / "missing.json"))


def test_dict_form_and_keys():
    for norm in (NormSpec.lp(3, 2), NormSpec.lp(1, 2, scales=(2, 1)), NormSpec.hexagon()):
        again = NormSpec.from_dict(json.loads(json.dumps(norm.to_dict())))
        assert again == norm
        assert again.key == norm.key
    assert NormSpec.lp(3, 2).key != NormSpec.lp(3, 3).key
    assert NormSpec.lp(1, 2, scales=(2, 1)).key != NormSpec.lp(1, 2, scales=(1, 2)).key


def test_symmetry_and_isometries():
    assert NormSpec.lp(1, 3).isometry_count() == 48
    assert NormSpec.lp("inf", 2).isometry_count() == 8
    assert NormSpec.lp(2, 2).isometry_count() is None
    assert NormSpec.cube(3).is_axis_symmetric()
    assert not NormSpec.hexagon().is_axis_symmetric()
    assert NormSpec.hexagon().half_widths == (1, 1)
    assert NormSpec.lp(2, 2, scales=(3, 1)).half_widths == (3, 1)
