from fractions import Fraction

import pytest

from meanharmonic.config import RunConfig, default_p_grid, parse_box, parse_degrees, parse_grid, parse_probe
from meanharmonic.errors import InvalidInput, InvalidNorm, InvalidPolynomial
from meanharmonic.norms import NormSpec


def test_default_p_grid():
    grid = default_p_grid()
    assert len(grid) == 94
    assert grid[:3] == [1.0, 1.1, 1.2]
    assert grid[-4:] == [10.0, 20.0, 50.0, 100.0]


def test_parse_degrees():
    assert parse_degrees("4..8") == [4, 5, 6, 7, 8]
    assert parse_degrees("4,6,7") == [4, 6, 7]
    with pytest.raises(InvalidInput):
        parse_degrees("four")


def test_parse_probe():
    assert parse_probe("0.3,-0.2:0.1", 2) == ((Fraction(3, 10), Fraction(-1, 5)), Fraction(1, 10))
    assert parse_probe("1/3, 0 : 1/7", 2) == ((Fraction(1, 3), Fraction(0)), Fraction(1, 7))
    for text in ("0,0", "0,0:0", "0:1", "a,b:1"):
        with pytest.raises(InvalidInput):
            parse_probe(text, 2)


def test_parse_box_and_grid():
    assert parse_box("-1,1", 2) == ((-1, 1), (-1, 1))
    with pytest.raises(InvalidInput):
        parse_box("1,-1", 2)
    assert parse_grid("1,2.5") == [1.0, 2.5]
    with pytest.raises(InvalidInput):
        parse_grid("1,x")


def test_validate_verify():
    config = RunConfig("verify", norm="lp:4", n=2, candidate="x*y^3 - x^3*y", probes=["0.3,-0.2:0.1"]).validate()
    assert config.norm_spec == NormSpec.lp(4, 2)
    assert config.probe_list == [((Fraction(3, 10), Fraction(-1, 5)), Fraction(1, 10))]
    assert config.domain_box == ((-2, 2), (-2, 2))
    assert config.output_format == "json"


def test_validate_defaults():
    assert RunConfig("scan", norm="lp:2", n=2, degrees="2..4").validate().output_format == "csv"
    assert RunConfig("fp").validate().p_grid == default_p_grid()
    bose = RunConfig("bose", weight="2 + x", degree=2).validate()
    assert bose.n == 2
    assert str(bose.weight_polynomial) == "x1 + 2"


@pytest.mark.parametrize(
    "kwargs,error",
    [
        (dict(command="moments", norm="lp:2", n=2), InvalidInput),
        (dict(command="moments", norm="lp:0.5", n=2, max_order=4), InvalidNorm),
        (dict(command="basis", norm="lp:2", n=2, degree=2, weight="sin(x)"), InvalidPolynomial),
        (dict(command="basis", norm="lp:2", n=2, degree=-1), InvalidInput),
        (dict(command="basis", norm="lp:2", n=2, degree=2, j_list=[0]), InvalidInput),
        (dict(command="verify", norm="lp:2", n=2, candidate="x"), InvalidInput),
        (dict(command="verify", norm="lp:2", n=2, candidate="x", probes=["0,0:1"], oracle="guess"), InvalidInput),
        (dict(command="verify", norm="lp:2", n=2, candidate="x", probe_count=3, samples=0), InvalidInput),
        (dict(command="scan", norm="lp:2", n=2, degrees="5,4"), InvalidInput),
        (dict(command="basis", norm="lp:2", n=2, degree=2, output_format="csv"), InvalidInput),
        (dict(command="fp", grid="0.5,2"), InvalidInput),
        (dict(command="fp", grid="1,2,inf"), InvalidInput),
        (dict(command="fp", grid="1,nan"), InvalidInput),
        (dict(command="unknown"), InvalidInput),
    ],
)
def test_validate_rejects(kwargs, error):
    with pytest.raises(error):
        RunConfig(**kwargs).validate()


def test_dict_form():
    config = RunConfig("basis", norm="lp:1", n=2, degree=6, j_list=[2, 4])
    again = RunConfig.from_dict(config.to_dict())
    assert again.to_dict() == config.to_dict()
    assert "degree=6" in repr(again)
