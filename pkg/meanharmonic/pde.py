from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
import csv
import io
import logging

import numpy as np
import sympy

from .errors import DimensionMismatch, InsufficientMomentOrder, InvalidInput
from .moments import MomentTable, coefficient_A
from .norms import NormSpec
from .polycore import MultiIndex, Polynomial, format_rational, grlex_key, indices_of_order, indices_up_to
from .scalar import Scalar

log = logging.getLogger(__name__)

# u ↦ residual polynomial with (possibly approximate) coefficients
Operator = Callable[[Polynomial], dict[MultiIndex, Scalar]]


@dataclass(frozen=True)
class Block:
    """
    one equation of a system: tag, operator and an upper bound for the degree of its output
    """

    tag: int
    operator: Operator
    out_degree: int


class PdeSystemMatrix:
    """
    A linear system of PDEs restricted to polynomials of degree ≤ D, written as a matrix acting on coefficient
    vectors. Column k belongs to the monomial ``column_basis[k]``; row (j, γ) holds the coefficient of x^γ in the
    j-th equation. Do not create an object of this class yourself, use the ``assemble_*`` functions.
    """

    def __init__(
        self,
        system: str,
        rows: list[list[Scalar]],
        row_tags: list[tuple[int, MultiIndex]],
        column_basis: list[MultiIndex],
        weight: Polynomial,
        degree: int,
        j_list: list[int],
        norm: NormSpec | None = None,
    ):
        self._system: str = system
        self._rows: list[list[Scalar]] = rows
        self._row_tags: list[tuple[int, MultiIndex]] = row_tags
        self._column_basis: list[MultiIndex] = column_basis
        self._weight: Polynomial = weight
        self._degree: int = degree
        self._j_list: list[int] = j_list
        self._norm: NormSpec | None = norm

    @property
    def system(self) -> str:
        return self._system

    @property
    def rows(self) -> list[list[Scalar]]:
        return [row.copy() for row in self._rows]

    @property
    def row_tags(self) -> list[tuple[int, MultiIndex]]:
        return list(self._row_tags)

    @property
    def column_basis(self) -> list[MultiIndex]:
        return list(self._column_basis)

    @property
    def weight(self) -> Polynomial:
        return self._weight

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def j_list(self) -> list[int]:
        return list(self._j_list)

    @property
    def norm(self) -> NormSpec | None:
        return self._norm

    @property
    def n(self) -> int:
        return self._weight.n

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), len(self._column_basis)

    @property
    def is_exact(self) -> bool:
        return all(s.is_exact for row in self._rows for s in row)

    def exact_rows(self) -> list[list[Fraction]]:
        assert self.is_exact, "matrix has approximate entries"
        return [[s.value for s in row] for row in self._rows]

    def float_array(self) -> np.ndarray:
        return np.array([[float(s) for s in row] for row in self._rows], dtype=float).reshape(self.shape)

    def error_array(self) -> np.ndarray:
        return np.array([[s.error for s in row] for row in self._rows], dtype=float).reshape(self.shape)

    def block(self, j: int) -> list[list[Scalar]]:
        return [row.copy() for row, (tag, _) in zip(self._rows, self._row_tags) if tag == j]

    def polynomial(self, coefficients: Sequence[Fraction]) -> Polynomial:
        """
        the polynomial Σ c_β x^β for a coefficient vector over the column basis
        """
        return Polynomial(self.n, dict(zip(self._column_basis, coefficients)))

    def to_csv(self) -> str:
        """
        debug export: one line per row, starting with the row tag
        """
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["j", "monomial"] + ["x^" + "".join(str(e) for e in beta) for beta in self._column_basis])
        for (j, gamma), row in zip(self._row_tags, self._rows):
            writer.writerow([j, " ".join(str(e) for e in gamma)] + [_format_entry(s) for s in row])
        return out.getvalue()

    def __repr__(self):
        return "PdeSystemMatrix({}, {}x{}, D={}, j={})".format(self._system, *self.shape, self._degree, self._j_list)


def _format_entry(s: Scalar) -> str:
    return format_rational(s.value) if s.is_exact else repr(s.value)


def _accumulate(acc: dict[MultiIndex, Scalar], p: Polynomial, factor: Scalar | Fraction | int = 1):
    for gamma, c in p.terms.items():
        value = factor * c if isinstance(factor, Scalar) else Scalar.exact(c * factor)
        acc[gamma] = acc[gamma] + value if gamma in acc else value


def _assemble(system: str, n: int, weight: Polynomial, degree: int, blocks: list[Block], **metadata) -> PdeSystemMatrix:
    if degree < 0:
        raise InvalidInput("ansatz degree must be non-negative, got {}".format(degree))
    columns = indices_up_to(n, degree)
    rows: list[list[Scalar]] = []
    tags: list[tuple[int, MultiIndex]] = []
    for block in blocks:
        outputs = indices_up_to(n, block.out_degree) if block.out_degree >= 0 else []
        position = {gamma: k for k, gamma in enumerate(outputs)}
        entries = [[Scalar.exact(0)] * len(columns) for _ in outputs]
        for col, beta in enumerate(columns):
            for gamma, value in block.operator(Polynomial.monomial(beta)).items():
                if gamma not in position:
                    # a nonzero output above the declared bound means the bound is wrong
                    assert value.is_zero(), "output monomial {} above degree {}".format(tuple(gamma), block.out_degree)
                    continue
                entries[position[gamma]][col] = value
        rows.extend(entries)
        tags.extend((block.tag, gamma) for gamma in outputs)
    log.debug("assembled %s system: %d rows, %d columns", system, len(rows), len(columns))
    return PdeSystemMatrix(system, rows, tags, columns, weight, degree, [b.tag for b in blocks], **metadata)


def default_j_list(degree: int, weight: Polynomial) -> list[int]:
    """
    all even j from 2 to D + deg w (rounded up to even); the Pizzetti series of polynomial data ends there
    """
    top = degree + max(weight.degree, 0)
    top += top % 2
    return list(range(2, max(top, 2) + 1, 2))


def moment_operator(table: MomentTable, j: int) -> list[tuple[MultiIndex, Scalar]]:
    """
    the nonzero terms A_α D^α of Σ_{|α|=j} A_α D^α
    """
    terms = []
    for alpha in indices_of_order(table.n, j):
        a = coefficient_A(alpha, table)
        if not (a.is_exact and a.value == 0):
            terms.append((alpha, a))
    return terms


def general_residual(u: Polynomial, w: Polynomial, terms: list[tuple[MultiIndex, Scalar]]) -> dict[MultiIndex, Scalar]:
    """
    Σ A_α (D^α(uw) - u D^α w) for the terms of one equation
    """
    acc: dict[MultiIndex, Scalar] = {}
    uw = u * w
    for alpha, a in terms:
        _accumulate(acc, uw.derivative(alpha) - u * w.derivative(alpha), a)
    return acc


def assemble_general(w: Polynomial, table: MomentTable, j_list: Sequence[int] | None, degree: int) -> PdeSystemMatrix:
    """
    The weighted mean value system: for each j, Σ_{|α|=j} A_α (D^α(uw) - u D^α w) = 0.

    :param j_list: orders of the equations (default: :func:`default_j_list`)
    :raises InsufficientMomentOrder: if the table does not reach max(j_list)
    """
    assert isinstance(w, Polynomial)
    assert isinstance(table, MomentTable)
    if w.n != table.n:
        raise DimensionMismatch("weight has dimension {}, moment table {}".format(w.n, table.n))
    j_list = default_j_list(degree, w) if j_list is None else sorted(set(j_list))
    if not j_list:
        raise InvalidInput("at least one equation order is needed")
    if any(not isinstance(j, int) or j < 1 for j in j_list):
        raise InvalidInput("equation orders must be positive integers, got {}".format(j_list))
    if max(j_list) > table.max_order:
        raise InsufficientMomentOrder(
            "equation order {} needs a moment table of order {}, got {}".format(max(j_list), max(j_list), table.max_order)
        )
    odd = [j for j in j_list if j % 2]
    if odd:
        log.warning("odd equation orders %s are identically zero for origin-symmetric balls", odd)

    blocks = []
    top = degree + max(w.degree, 0)
    for j in j_list:
        terms = moment_operator(table, j)
        blocks.append(Block(j, lambda u, terms=terms: general_residual(u, w, terms), top - j))
    return _assemble("general", table.n, w, degree, blocks, norm=table.norm)


def assemble_fl(table: MomentTable, j_list: Sequence[int] | None, degree: int) -> PdeSystemMatrix:
    """
    the unweighted system Σ_{|α|=j} A_α D^α u = 0 (w = 1)
    """
    matrix = assemble_general(Polynomial.constant(table.n, 1), table, j_list, degree)
    matrix._system = "fl"
    return matrix


def bose_residual(u: Polynomial, w_j: Polynomial) -> Polynomial:
    """
    Δu·Δʲw + 2∇u·∇(Δʲw), given Δʲw
    """
    return u.laplacian() * w_j + u.grad_dot(w_j) * 2


def laplace_powers(w: Polynomial, count: int) -> list[Polynomial]:
    """
    [w, Δw, …, Δ^{count-1} w]
    """
    powers = [w]
    while len(powers) < count:
        powers.append(powers[-1].laplacian())
    return powers[:count]


def assemble_bose(w: Polynomial, l: int, degree: int) -> PdeSystemMatrix:
    """
    the Euclidean weighted system Δu·Δʲw + 2∇u·∇(Δʲw) = 0 for j = 0, …, l
    """
    assert isinstance(w, Polynomial)
    if l < 0:
        raise InvalidInput("l must be non-negative, got {}".format(l))
    blocks = []
    top = degree + max(w.degree, 0) - 2
    for j, w_j in enumerate(laplace_powers(w, l + 1)):
        blocks.append(Block(j, lambda u, w_j=w_j: _exact_image(bose_residual(u, w_j)), top - 2 * j))
    return _assemble("bose", w.n, w, degree, blocks)


def iterated_laplace_residual(u: Polynomial, w: Polynomial, l: int) -> Polynomial:
    return (u * w).laplacian_iter(l) - u * w.laplacian_iter(l)


def assemble_iterated_laplace(w: Polynomial, l_max: int, degree: int) -> PdeSystemMatrix:
    """
    the system Δˡ(uw) = uΔˡw for l = 1, …, l_max
    """
    assert isinstance(w, Polynomial)
    if l_max < 1:
        raise InvalidInput("l_max must be at least 1, got {}".format(l_max))
    blocks = []
    top = degree + max(w.degree, 0)
    for l in range(1, l_max + 1):
        blocks.append(Block(l, lambda u, l=l: _exact_image(iterated_laplace_residual(u, w, l)), top - 2 * l))
    return _assemble("iterated_laplace", w.n, w, degree, blocks)


def _exact_image(p: Polynomial) -> dict[MultiIndex, Scalar]:
    return {gamma: Scalar.exact(c) for gamma, c in p.terms.items()}


def bose_closure_order(w: Polynomial) -> int:
    """
    The least l ≥ 1 such that Δˡw is a linear combination of w, Δw, …, Δ^{l-1}w. When this holds, the Bose
    equations for j = 0, …, l-1 already characterize the weighted mean value property.
    """
    assert isinstance(w, Polynomial)
    if w.is_zero():
        raise InvalidInput("the zero weight does not define a measure")
    powers = [w]
    while True:
        nxt = powers[-1].laplacian()
        monomials = sorted({g for p in powers + [nxt] for g in p.terms}, key=grlex_key)
        span = sympy.Matrix([[_sym(p.coefficient(g)) for g in monomials] for p in powers])
        extended = span.col_join(sympy.Matrix([[_sym(nxt.coefficient(g)) for g in monomials]]))
        if extended.rank() == span.rank():
            return len(powers)
        powers.append(nxt)


def _sym(c: Fraction) -> sympy.Rational:
    return sympy.Rational(c.numerator, c.denominator)


def laplace_eigenvalue(w: Polynomial) -> Fraction | None:
    """
    λ with Δw = λw if it exists (for a polynomial weight only λ = 0 is possible), else None
    """
    lap = w.laplacian()
    if lap.is_zero():
        return Fraction(0)
    if w.is_zero():
        return None
    alpha, c = w.leading()
    ratio = lap.coefficient(alpha) / c
    return ratio if lap == w * ratio else None
