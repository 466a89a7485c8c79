from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement
from math import comb, factorial, prod
from tokenize import TokenError
import logging

import sympy
from sympy.polys.polyerrors import BasePolynomialError
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from .errors import DimensionMismatch, InvalidPolynomial

log = logging.getLogger(__name__)

Rational = Fraction | int
_ALIASES = ("x", "y", "z")


class MultiIndex(tuple):
    """
    An exponent tuple α ∈ ℕⁿ. Hashes and compares like the plain tuple, so it can be used interchangeably
    with tuples as dictionary keys. Addition and subtraction act componentwise.
    """

    def __new__(cls, exponents: Iterable[int]):
        exponents = tuple(exponents)
        for e in exponents:
            if not isinstance(e, int) or e < 0:
                raise ValueError("multi-index entries must be non-negative integers, got {}".format(exponents))
        return super().__new__(cls, exponents)

    @classmethod
    def zero(cls, n: int) -> MultiIndex:
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> MultiIndex:
        return cls(1 if k == i else 0 for k in range(n))

    @property
    def n(self) -> int:
        return len(self)

    @property
    def order(self) -> int:
        """
        :return: |α| = α₁ + … + αₙ
        """
        return sum(self)

    @property
    def binomial(self) -> int:
        """
        :return: the multinomial coefficient |α|!/(α₁!…αₙ!)
        """
        return factorial(self.order) // prod(factorial(e) for e in self)

    @property
    def factorial(self) -> int:
        return prod(factorial(e) for e in self)

    def has_odd_component(self) -> bool:
        return any(e % 2 for e in self)

    def divides(self, other: Sequence[int]) -> bool:
        return all(a <= b for a, b in zip(self, other))

    def __add__(self, other: Sequence[int]) -> MultiIndex:
        _check_dimension(len(self), len(other))
        return MultiIndex(a + b for a, b in zip(self, other))

    def __sub__(self, other: Sequence[int]) -> MultiIndex:
        _check_dimension(len(self), len(other))
        return MultiIndex(a - b for a, b in zip(self, other))

    def scaled(self, k: int) -> MultiIndex:
        return MultiIndex(k * e for e in self)

    def __repr__(self):
        return "MultiIndex({})".format(tuple(self))


def grlex_key(alpha: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """
    sort key of the graded lexicographic order with x1 > x2 > … > xn
    """
    return sum(alpha), tuple(alpha)


def indices_of_order(n: int, order: int) -> list[MultiIndex]:
    """
    all multi-indices with |α| = order, ascending in graded lexicographic order
    """
    result = []
    for combo in combinations_with_replacement(range(n), order):
        exps = [0] * n
        for i in combo:
            exps[i] += 1
        result.append(MultiIndex(exps))
    return sorted(result, key=grlex_key)


def indices_up_to(n: int, degree: int) -> list[MultiIndex]:
    """
    all multi-indices with |α| ≤ degree, ascending in graded lexicographic order; there are binom(n+degree, n) of them
    """
    result = []
    for d in range(degree + 1):
        result.extend(indices_of_order(n, d))
    return result


def _check_dimension(n1: int, n2: int):
    if n1 != n2:
        raise DimensionMismatch("dimension {} does not match dimension {}".format(n1, n2))


def _falling(k: int, m: int) -> int:
    # k (k-1) … (k-m+1)
    return prod(range(k - m + 1, k + 1))


def as_rational(value: Rational | float | str) -> Fraction:
    """
    convert a user supplied number to an exact rational; floats are read through their shortest decimal
    representation, so 0.3 becomes 3/10
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError("cannot convert {!r} to a rational".format(value))


def format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else "{}/{}".format(value.numerator, value.denominator)


class Polynomial:
    """
    A multivariate polynomial in the variables x1, …, xn with exact rational coefficients.
    Instances are immutable; no zero coefficient is ever stored, so equal polynomials have equal term maps.

    :param n: number of variables
    :param terms: mapping from exponent tuples to coefficients
    """

    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Sequence[int], Rational] | None = None):
        assert isinstance(n, int) and n >= 1
        self._n: int = n
        self._terms: dict[MultiIndex, Fraction] = {}
        self._hash: int | None = None
        for alpha, c in (terms or {}).items():
            if len(alpha) != n:
                raise DimensionMismatch("exponent {} in a polynomial of dimension {}".format(tuple(alpha), n))
            c = as_rational(c)
            if c != 0:
                key = MultiIndex(alpha)
                c += self._terms.get(key, 0)
                if c == 0:
                    del self._terms[key]
                else:
                    self._terms[key] = c

    @classmethod
    def _raw(cls, n: int, terms: dict) -> Polynomial:
        # terms already canonical
        p = cls.__new__(cls)
        p._n = n
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, n: int) -> Polynomial:
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c: Rational) -> Polynomial:
        return cls(n, {MultiIndex.zero(n): c})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: Rational = 1) -> Polynomial:
        return cls(len(alpha), {MultiIndex(alpha): c})

    @classmethod
    def variable(cls, n: int, i: int) -> Polynomial:
        """
        :param i: zero based index, so variable(n, 0) is x1
        """
        return cls.monomial(MultiIndex.unit(n, i))

    @classmethod
    def parse(cls, text: str, n: int) -> Polynomial:
        """
        Parse the text format ``c * x1^a1 … xn^an + …``. Coefficients may be written as ``num/den``.
        For n ≤ 3 the aliases x, y, z may be used for x1, x2, x3.

        :raises InvalidPolynomial: if the text is not a polynomial in the declared variables
        """
        assert isinstance(text, str)
        assert isinstance(n, int)
        symbols = sympy.symbols(" ".join("x{}".format(i + 1) for i in range(n)), seq=True)
        local = {str(s): s for s in symbols}
        if n <= len(_ALIASES):
            local.update({_ALIASES[i]: symbols[i] for i in range(n)})
        try:
            expr = parse_expr(text, local_dict=local, transformations=standard_transformations + (convert_xor,))
            poly = sympy.Poly(expr, *symbols, domain="QQ")
        except (sympy.SympifyError, BasePolynomialError, TokenError, SyntaxError, TypeError, ValueError) as e:
            raise InvalidPolynomial("cannot read {!r} as a polynomial in {} variables: {}".format(text, n, e))
        return cls(
            n,
            {exps: Fraction(int(c.p), int(c.q)) for exps, c in poly.terms() if c != 0},
        )

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> dict[MultiIndex, Fraction]:
        return self._terms.copy()

    @property
    def degree(self) -> int:
        """
        :return: max |α| over the stored terms; -1 for the zero polynomial
        """
        return max((alpha.order for alpha in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, alpha: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(alpha), Fraction(0))

    def items(self) -> Iterator[tuple[MultiIndex, Fraction]]:
        """
        iterate over (exponent, coefficient) pairs in descending graded lexicographic order
        """
        for alpha in sorted(self._terms, key=grlex_key, reverse=True):
            yield alpha, self._terms[alpha]

    def leading(self) -> tuple[MultiIndex, Fraction]:
        return next(self.items())

    # arithmetic

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            _check_dimension(self._n, other._n)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self._n, other)
        return NotImplemented

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = self._terms.copy()
        for alpha, c in other._terms.items():
            s = terms.get(alpha, 0) + c
            if s == 0:
                terms.pop(alpha, None)
            else:
                terms[alpha] = s
        return Polynomial._raw(self._n, terms)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw(self._n, {alpha: -c for alpha, c in self._terms.items()})

    def __sub__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Polynomial.zero(self._n)
            return Polynomial._raw(self._n, {alpha: c * other for alpha, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[MultiIndex, Fraction] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                key = a + b
                terms[key] = terms.get(key, 0) + ca * cb
        return Polynomial._raw(self._n, {k: v for k, v in terms.items() if v != 0})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        assert isinstance(k, int) and k >= 0
        return reduce(lambda acc, _: acc * self, range(k), Polynomial.constant(self._n, 1))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self._n, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    # calculus

    def derivative(self, alpha: Sequence[int]) -> Polynomial:
        """
        :return: D^α of this polynomial
        :raises DimensionMismatch: if α has the wrong length
        """
        _check_dimension(self._n, len(alpha))
        alpha = MultiIndex(alpha)
        terms = {}
        for beta, c in self._terms.items():
            if not alpha.divides(beta):
                continue
            factor = prod(_falling(b, a) for a, b in zip(alpha, beta))
            terms[beta - alpha] = c * factor
        return Polynomial._raw(self._n, terms)

    def partial(self, i: int) -> Polynomial:
        return self.derivative(MultiIndex.unit(self._n, i))

    def laplacian(self) -> Polynomial:
        result = Polynomial.zero(self._n)
        for i in range(self._n):
            result = result + self.derivative(MultiIndex.unit(self._n, i).scaled(2))
        return result

    def laplacian_iter(self, l: int) -> Polynomial:
        assert isinstance(l, int)
        if l < 1:
            raise ValueError("the number of Laplacians must be at least 1, got {}".format(l))
        result = self
        for _ in range(l):
            result = result.laplacian()
        return result

    def grad_dot(self, other: Polynomial) -> Polynomial:
        """
        :return: ∇p · ∇q
        """
        assert isinstance(other, Polynomial)
        _check_dimension(self._n, other._n)
        result = Polynomial.zero(self._n)
        for i in range(self._n):
            result = result + self.partial(i) * other.partial(i)
        return result

    # evaluation and substitution

    def evaluate(self, point: Sequence[Rational | float]):
        """
        :return: exact rational for rational points, float as soon as one coordinate is a float
        """
        _check_dimension(self._n, len(point))
        if any(isinstance(x, float) for x in point):
            point = [float(x) for x in point]
            return float(sum(float(c) * prod(x**e for x, e in zip(point, alpha)) for alpha, c in self._terms.items()))
        point = [as_rational(x) for x in point]
        return sum(
            (c * prod(x**e for x, e in zip(point, alpha)) for alpha, c in self._terms.items()),
            Fraction(0),
        )

    def compose_affine(self, matrix: Sequence[Sequence[Rational]], offset: Sequence[Rational] | None = None) -> Polynomial:
        """
        Substitute x = offset + M t, where M is an n×m matrix; the result is a polynomial in the m variables t.
        """
        _check_dimension(self._n, len(matrix))
        m = len(matrix[0])
        if offset is None:
            offset = [0] * self._n
        _check_dimension(self._n, len(offset))
        linear = []
        for row, shift in zip(matrix, offset):
            _check_dimension(m, len(row))
            terms = {MultiIndex.unit(m, k): c for k, c in enumerate(row)}
            terms[MultiIndex.zero(m)] = shift
            linear.append(Polynomial(m, terms))

        powers: list[list[Polynomial]] = [[Polynomial.constant(m, 1)] for _ in range(self._n)]
        result = Polynomial.zero(m)
        for alpha, c in self._terms.items():
            term = Polynomial.constant(m, c)
            for i, e in enumerate(alpha):
                while len(powers[i]) <= e:
                    powers[i].append(powers[i][-1] * linear[i])
                term = term * powers[i][e]
            result = result + term
        return result

    def translate_scale(self, center: Sequence[Rational], r: Rational) -> Polynomial:
        """
        :return: the polynomial y ↦ p(center + r y)
        """
        r = as_rational(r)
        diag = [[r if i == k else 0 for k in range(self._n)] for i in range(self._n)]
        return self.compose_affine(diag, [as_rational(c) for c in center])

    # text format

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for alpha, c in self.items():
            factors = []
            for i, e in enumerate(alpha):
                if e == 1:
                    factors.append("x{}".format(i + 1))
                elif e > 1:
                    factors.append("x{}^{}".format(i + 1, e))
            mono = "*".join(factors)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = format_rational(mag) + "*" + mono
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += " {} {}".format(sign, body)
        return text

    def __repr__(self):
        return "Polynomial({}, {!r})".format(self._n, str(self))


def derivative(p: Polynomial, alpha: Sequence[int]) -> Polynomial:
    return p.derivative(alpha)


def laplacian_iter(p: Polynomial, l: int) -> Polynomial:
    return p.laplacian_iter(l)


def grad_dot(p: Polynomial, q: Polynomial) -> Polynomial:
    return p.grad_dot(q)


def evaluate(p: Polynomial, point: Sequence[Rational | float]):
    return p.evaluate(point)


def monomial_count(n: int, degree: int) -> int:
    return comb(n + degree, n)
