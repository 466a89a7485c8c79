from fractions import Fraction

import pytest

from meanharmonic.errors import InsufficientMomentOrder, InvalidInput
from meanharmonic.moments import MomentTable
from meanharmonic.norms import NormSpec
from meanharmonic.pde import (
    assemble_bose,
    assemble_fl,
    assemble_general,
    assemble_iterated_laplace,
    bose_closure_order,
    bose_residual,
    default_j_list,
    general_residual,
    iterated_laplace_residual,
    laplace_eigenvalue,
    laplace_powers,
    moment_operator,
)
from meanharmonic.polycore import Polynomial


def P(text: str, n: int = 2) -> Polynomial:
    return Polynomial.parse(text, n)


def operator_values(table, j):
    return {tuple(alpha): a.value for alpha, a in moment_operator(table, j)}


def test_fourth_order_operator_of_the_cube():
    table = MomentTable.build(NormSpec.lp("inf", 2), 4)
    terms = operator_values(table, 4)
    assert terms == {(0, 4): Fraction(1, 5), (2, 2): Fraction(2, 3), (4, 0): Fraction(1, 5)}
    assert terms[(2, 2)] / terms[(4, 0)] == Fraction(10, 3)


def test_fourth_order_operator_of_the_disc_is_a_bilaplacian():
    terms = operator_values(MomentTable.build(NormSpec.lp(2, 2), 4), 4)
    assert terms[(2, 2)] / terms[(4, 0)] == 2
    assert terms[(4, 0)] == terms[(0, 4)]


@pytest.mark.parametrize("norm", [NormSpec.lp(1, 2), NormSpec.lp(2, 2), NormSpec.lp(3, 2), NormSpec.lp("inf", 2)])
def test_second_order_operator_is_a_multiple_of_the_laplacian(norm):
    terms = dict(moment_operator(MomentTable.build(norm, 2), 2))
    assert set(map(tuple, terms)) == {(2, 0), (0, 2)}
    assert terms[(2, 0)].agrees(terms[(0, 2)])


def test_default_j_list():
    assert default_j_list(6, P("1")) == [2, 4, 6]
    assert default_j_list(2, P("2 + x")) == [2, 4]
    assert default_j_list(4, P("x^4 + y^4 + 1")) == [2, 4, 6, 8]
    assert default_j_list(0, P("1")) == [2]


def test_general_system_layout():
    table = MomentTable.build(NormSpec.lp(2, 2), 2)
    matrix = assemble_general(P("1"), table, [2], 2)
    assert matrix.system == "general"
    assert matrix.shape == (1, 6)
    assert [tuple(beta) for beta in matrix.column_basis] == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert matrix.row_tags == [(2, (0, 0))]
    assert matrix.exact_rows() == [[0, 0, 0, Fraction(1, 2), 0, Fraction(1, 2)]]
    assert matrix.norm == NormSpec.lp(2, 2)
    assert matrix.to_csv().splitlines()[0] == "j,monomial,x^00,x^01,x^10,x^02,x^11,x^20"


def test_odd_orders_give_zero_rows():
    table = MomentTable.build(NormSpec.lp(3, 2), 4)
    matrix = assemble_general(P("1"), table, [3], 4)
    assert matrix.shape[0] == 3
    assert all(s.is_exact and s.value == 0 for row in matrix.rows for s in row)


def test_insufficient_moment_order():
    table = MomentTable.build(NormSpec.lp(2, 2), 2)
    with pytest.raises(InsufficientMomentOrder):
        assemble_general(P("1"), table, [4], 4)
    with pytest.raises(InvalidInput):
        assemble_general(P("1"), table, [0], 2)
    with pytest.raises(InvalidInput):
        assemble_general(P("1"), table, [2], -1)


def test_polytope_and_lp_systems_agree():
    diamond = assemble_fl(MomentTable.build(NormSpec.cross_polytope(2), 6), [2, 4, 6], 6)
    l_1 = assemble_fl(MomentTable.build(NormSpec.lp(1, 2), 6), [2, 4, 6], 6)
    assert diamond.system == "fl"
    assert diamond.exact_rows() == l_1.exact_rows()
    assert diamond.row_tags == l_1.row_tags


def test_assembly_is_deterministic():
    table = MomentTable.build(NormSpec.lp("inf", 2), 8)
    a = assemble_general(P("2 + x"), table, None, 6)
    b = assemble_general(P("2 + x"), table, None, 6)
    assert a.exact_rows() == b.exact_rows()
    assert a.to_csv() == b.to_csv()


def test_general_residual_of_a_harmonic_polynomial():
    table = MomentTable.build(NormSpec.lp(2, 2), 4)
    u = P("x^3 - 3*x*y^2")
    for j in (2, 4):
        residual = general_residual(u, P("1"), moment_operator(table, j))
        assert all(value.is_zero() for value in residual.values())


def test_bose_equations():
    u = P("x^2 - 3*y^2 + 4*x")
    w = P("2 + x")
    assert bose_residual(u, w).is_zero()
    assert bose_residual(u, w.laplacian()).is_zero()
    assert iterated_laplace_residual(u, w, 1).is_zero()
    assert not bose_residual(P("x^2"), w).is_zero()


def test_bose_block_layout():
    matrix = assemble_bose(P("1 + x^2 + y^2"), 1, 2)
    assert matrix.system == "bose"
    assert matrix.j_list == [0, 1]
    assert [[s.value for s in row] for row in matrix.block(1)] == [[0, 0, 0, 8, 0, 8]]


def test_bose_with_unit_weight_is_the_laplace_system():
    bose = assemble_bose(P("1"), 2, 4)
    laplace = assemble_fl(MomentTable.build(NormSpec.lp(2, 2), 2), [2], 4)
    assert all(s.value == 0 for j in (1, 2) for row in bose.block(j) for s in row)
    # Δu against (1/4) Δu
    assert [[4 * v for v in row] for row in laplace.exact_rows()] == [[s.value for s in row] for row in bose.block(0)]


def test_iterated_system():
    matrix = assemble_iterated_laplace(P("2 + x"), 2, 3)
    assert matrix.system == "iterated_laplace"
    assert matrix.j_list == [1, 2]
    with pytest.raises(InvalidInput):
        assemble_iterated_laplace(P("1"), 0, 3)
    with pytest.raises(InvalidInput):
        assemble_bose(P("1"), -1, 3)


def test_laplace_powers():
    assert laplace_powers(P("x^4 + y^4 + 1"), 4) == [P("x^4 + y^4 + 1"), P("12*x^2 + 12*y^2"), P("48"), P("0")]


@pytest.mark.parametrize(
    "w,order",
    [("1", 1), ("2 + x", 1), ("1 + x^2 + y^2", 2), ("x^4 + y^4 + 1", 3), ("x^2 - y^2 + 3", 1)],
)
def test_bose_closure_order(w, order):
    assert bose_closure_order(P(w)) == order


def test_bose_closure_order_rejects_zero():
    with pytest.raises(InvalidInput):
        bose_closure_order(P("0"))


def test_laplace_eigenvalue():
    assert laplace_eigenvalue(P("2 + x")) == 0
    assert laplace_eigenvalue(P("1")) == 0
    assert laplace_eigenvalue(P("x^4 + y^4 + 1")) is None
    assert laplace_eigenvalue(P("1 + x^2 + y^2")) is None
