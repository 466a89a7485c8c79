from fractions import Fraction
import math

import numpy as np
import pytest

from meanharmonic.config import default_p_grid
from meanharmonic.errors import InsufficientMomentOrder, InvalidInput, InvalidNorm
from meanharmonic.moments import (
    MomentTable,
    coefficient_A,
    ellipticity_certificate,
    f_ratio,
    f_ratio_derivative,
    f_ratio_numeric_derivative,
    f_ratio_scan,
    lp_moment,
    lp_volume,
    mc_moment,
    polytope_moment,
    symbol_matrix,
)
from meanharmonic.norms import NormSpec
from meanharmonic.polycore import indices_up_to


@pytest.mark.parametrize(
    "p,alpha,expected",
    [
        (2, (2, 0), Fraction(1, 4)),
        (2, (2, 2), Fraction(1, 24)),
        (2, (4, 0), Fraction(1, 8)),
        ("inf", (2, 0), Fraction(1, 3)),
        ("inf", (2, 2), Fraction(1, 9)),
        (1, (2, 0), Fraction(1, 6)),
        (1, (2, 2), Fraction(1, 90)),
        (3, (1, 0), Fraction(0)),
        (3, (0, 0), Fraction(1)),
    ],
)
def test_exact_moments(p, alpha, expected):
    m = lp_moment(p, 2, alpha)
    assert m.is_exact
    assert m.value == expected


def test_moments_with_odd_component_vanish():
    for alpha in indices_up_to(3, 5):
        if alpha.has_odd_component():
            assert lp_moment(4, 3, alpha).value == 0
            assert polytope_moment(NormSpec.cube(3), alpha).value == 0


def test_generic_exponent_matches_closed_forms():
    # the Gamma formula with a non-special exponent close to 2 stays close to the ℓ² value
    near = lp_moment(Fraction(2000001, 1000000), 2, (2, 2))
    assert near.value == pytest.approx(1 / 24, rel=1e-5)
    assert not near.is_exact


def test_scaled_moments():
    assert lp_moment(2, 2, (2, 0), scales=(3, 1)).value == Fraction(9, 4)
    assert lp_moment("inf", 2, (2, 2), scales=(2, 1)).value == Fraction(4, 9)


def test_invalid_exponent():
    with pytest.raises(InvalidNorm):
        lp_moment(Fraction(1, 2), 2, (2, 0))
    with pytest.raises(InvalidInput):
        lp_moment(2, 2, (2, 0, 0))


def test_volumes():
    assert lp_volume(NormSpec.lp("inf", 3)).value == 8
    assert lp_volume(NormSpec.lp(1, 3)).value == Fraction(4, 3)
    circle = lp_volume(NormSpec.lp(2, 2))
    assert circle.agrees(Fraction(math.pi))
    assert lp_volume(NormSpec.lp(2, 3)).value == pytest.approx(4 * math.pi / 3, rel=1e-12)


def test_polytope_moments():
    assert polytope_moment(NormSpec.cross_polytope(2), (2, 0)).value == Fraction(1, 6)
    assert polytope_moment(NormSpec.cube(2), (2, 2)).value == Fraction(1, 9)
    assert polytope_moment(NormSpec.cube(3), (2, 2, 2)).value == Fraction(1, 27)


@pytest.mark.parametrize(
    "polytope,p",
    [(NormSpec.cross_polytope(2), 1), (NormSpec.cube(2), "inf"), (NormSpec.cross_polytope(3), 1)],
)
def test_polytope_tables_match_lp_tables(polytope, p):
    exact = MomentTable.build(polytope, 6)
    closed = MomentTable.build(NormSpec.lp(p, polytope.n), 6)
    for alpha, value in exact.entries().items():
        assert value.value == closed.moment(alpha).value


def test_hexagon_moments_are_not_axis_symmetric():
    table = MomentTable.build(NormSpec.hexagon(), 2)
    assert table.is_exact
    assert table.moment((1, 1)).value != 0
    assert table.moment((0, 0)).value == 1
    assert table.moment((2, 0)).value == table.moment((0, 2)).value


def test_mc_moment_agrees_with_gamma_formula():
    estimate = mc_moment(NormSpec.lp(3, 2), (2, 0), 200_000, seed=1)
    assert estimate.agrees(lp_moment(3, 2, (2, 0)))
    assert estimate.error < 1e-2


def test_mc_moment_is_reproducible():
    norm = NormSpec.lp(4, 2)
    a = mc_moment(norm, (2, 2), 100_000, seed=5)
    b = mc_moment(norm, (2, 2), 100_000, seed=5)
    c = mc_moment(norm, (2, 2), 100_000, seed=6)
    assert (a.value, a.error) == (b.value, b.error)
    assert a.value != c.value


def test_mc_moment_needs_samples():
    with pytest.raises(InvalidInput):
        mc_moment(NormSpec.lp(3, 2), (2, 0), 100, seed=0)


def test_moment_table():
    table = MomentTable.build(NormSpec.lp(3, 2), 3)
    assert table.max_order == 4
    assert table.moment((0, 0)).agrees(1)
    for alpha, m in table.entries().items():
        assert -m.error <= float(m) <= 1 + m.error
        if alpha.has_odd_component():
            assert m.is_exact and m.value == 0
    with pytest.raises(InsufficientMomentOrder):
        table.moment((6, 0))


def test_unnormalized_table():
    square = MomentTable.build(NormSpec.lp("inf", 2), 2).unnormalized()
    assert square.moment((2, 0)).value == Fraction(4, 3)
    assert square.moment((0, 0)).value == 4
    disc = MomentTable.build(NormSpec.lp(2, 2), 2).unnormalized()
    assert disc.moment((2, 0)).agrees(Fraction(math.pi) / 4)


def test_table_dict_form():
    table = MomentTable.build(NormSpec.lp(2, 2), 4)
    data = table.to_dict()
    assert {"alpha": [2, 0], "value": {"exact": "1/4"}} in data["entries"]
    again = MomentTable.from_dict(data)
    assert again.key == table.key
    assert again.moment((2, 2)).value == Fraction(1, 24)


def test_coefficients_of_the_fourth_order_operator():
    cube = MomentTable.build(NormSpec.lp("inf", 2), 4)
    assert coefficient_A((4, 0), cube).value == Fraction(1, 5)
    assert coefficient_A((2, 2), cube).value == Fraction(2, 3)
    disc = MomentTable.build(NormSpec.lp(2, 2), 4)
    assert coefficient_A((2, 2), disc).value / coefficient_A((4, 0), disc).value == 2


def test_f_ratio_values():
    assert f_ratio(2) == pytest.approx(1 / 3, abs=1e-12)
    assert f_ratio(1) == pytest.approx(1 / 6, abs=1e-12)
    assert f_ratio(1000) == pytest.approx(5 / 9, abs=1e-2)
    with pytest.raises(InvalidNorm):
        f_ratio(0.5)
    with pytest.raises(InvalidNorm):
        f_ratio(math.inf)
    with pytest.raises(InvalidNorm):
        f_ratio(math.nan)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.7, 10.0, 100.0])
def test_f_ratio_derivative(p):
    assert f_ratio_derivative(p) > 0
    assert f_ratio_derivative(p) == pytest.approx(f_ratio_numeric_derivative(p), abs=1e-6)


def test_f_ratio_scan_on_default_grid():
    scan = f_ratio_scan(default_p_grid())
    assert scan.strictly_increasing
    assert scan.derivative_deviation < 1e-6
    assert scan.crossing == pytest.approx(2.0, abs=1e-9)
    assert len(scan.rows) == 94
    assert scan.to_csv().startswith("p,f,df,df_numeric\n1.0,")


def test_f_ratio_scan_refines_crossing():
    scan = f_ratio_scan([1.5, 2.5, 3.0])
    assert scan.crossing_interval == (1.5, 2.5)
    assert scan.crossing == pytest.approx(2.0, abs=1e-12)
    assert f_ratio_scan([3.0, 4.0]).crossing is None
    with pytest.raises(InvalidInput):
        f_ratio_scan([2.0, 1.0])


@pytest.mark.parametrize(
    "norm,expected",
    [
        (NormSpec.lp(2, 2), Fraction(1, 4)),
        (NormSpec.lp("inf", 2), Fraction(1, 3)),
        (NormSpec.lp(1, 2), Fraction(1, 6)),
        (NormSpec.lp(2, 3), Fraction(1, 5)),
        (NormSpec.lp("inf", 3), Fraction(1, 3)),
    ],
)
def test_ellipticity_certificate(norm, expected):
    certificate = ellipticity_certificate(MomentTable.build(norm, 2))
    assert certificate.is_exact
    assert certificate.value == expected


def test_ellipticity_of_approximate_and_skew_balls():
    assert ellipticity_certificate(MomentTable.build(NormSpec.lp(3, 2), 2)).is_positive()
    hexagon = MomentTable.build(NormSpec.hexagon(), 2)
    matrix = symbol_matrix(hexagon)
    assert matrix[0][1].value == matrix[1][0].value != 0
    assert ellipticity_certificate(hexagon).is_positive()


def test_ellipticity_of_skew_polytope_in_three_dimensions():
    skew = NormSpec.polytope([(s * a, s * b, s * c) for a, b, c in [(1, 0, 0), (1, 1, 0), (0, 1, 1), (1, 2, 3)] for s in (1, -1)])
    table = MomentTable.build(skew, 2)
    matrix = symbol_matrix(table)
    assert any(matrix[i][k].value != 0 for i in range(3) for k in range(3) if i != k)
    certificate = ellipticity_certificate(table)
    assert certificate.is_positive()
    floats = np.array([[float(s) for s in row] for row in matrix])
    assert float(certificate) == pytest.approx(np.linalg.eigvalsh(floats).min(), rel=1e-9)
