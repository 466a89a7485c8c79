from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, isfinite, prod
import logging

import mpmath
import numpy as np
import sympy

from .abc import Cacheable
from .errors import DegenerateBody, EllipticityFailure, InsufficientMomentOrder, InvalidInput, InvalidNorm
from .norms import INF, NormSpec
from .polycore import MultiIndex, Polynomial, Rational, as_rational, indices_up_to
from .scalar import Scalar

log = logging.getLogger(__name__)

WORKING_DPS = 30
GAMMA_ERROR = 1e-13
EIGENVALUE_MATCH = 1e-9
MC_BATCH = 1 << 16
MIN_ACCEPTANCE = 1e-3
MIN_SAMPLES = 10_000


def _rising(x: Fraction, k: int) -> Fraction:
    # x (x+1) … (x+k-1)
    return prod((x + i for i in range(k)), start=Fraction(1))


def _mp(value: Fraction | float):
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def lp_moment(p: Rational | float | str, n: int, alpha: Sequence[int], scales: Sequence[Rational] | None = None) -> Scalar:
    """
    Normalized moment M_α = ⨍_{B(0,1)} y^α dy of the ℓᵖ unit ball, from the Dirichlet integral

        ∫_{B(0,1)} |y^α| dy = (2/p)ⁿ ∏ Γ((αᵢ+1)/p) / Γ(1 + (|α|+n)/p).

    Exact for p ∈ {1, 2, ∞}; otherwise evaluated with mpmath and returned with an absolute error bound.
    Moments with an odd component vanish exactly.

    :raises InvalidNorm: if p < 1
    """
    spec = NormSpec.lp(p, n, scales)
    alpha = MultiIndex(alpha)
    if alpha.n != n:
        raise InvalidInput("multi-index {} for dimension {}".format(tuple(alpha), n))
    if alpha.has_odd_component():
        return Scalar.exact(0)

    p = spec.p
    stretch = prod((a**e for a, e in zip(spec.scales, alpha)), start=Fraction(1))
    if p == INF:
        return Scalar.exact(stretch / prod(e + 1 for e in alpha))
    if p == 1:
        value = Fraction(alpha.factorial * factorial(n), factorial(alpha.order + n))
        return Scalar.exact(stretch * value)
    if p == 2:
        half = Fraction(1, 2)
        numerator = prod((_rising(half, e // 2) for e in alpha), start=Fraction(1))
        denominator = _rising(Fraction(n, 2) + 1, alpha.order // 2)
        return Scalar.exact(stretch * numerator / denominator)

    with mpmath.workdps(WORKING_DPS):
        mp_p = _mp(p)
        value = mpmath.gamma(1 + n / mp_p) / mpmath.gamma(1 + (alpha.order + n) / mp_p)
        for e in alpha:
            value *= mpmath.gamma((e + 1) / mp_p) / mpmath.gamma(1 / mp_p)
        value *= _mp(stretch)
        return Scalar.approx(float(value), GAMMA_ERROR)


def lp_volume(spec: NormSpec) -> Scalar:
    """
    |B(0,1)| = 2ⁿ Γ(1+1/p)ⁿ / Γ(1+n/p) · ∏ aᵢ
    """
    n = spec.n
    stretch = prod(spec.scales, start=Fraction(1))
    if spec.p == INF:
        return Scalar.exact(2**n * stretch)
    if spec.p == 1:
        return Scalar.exact(Fraction(2**n, factorial(n)) * stretch)
    with mpmath.workdps(WORKING_DPS):
        mp_p = _mp(spec.p)
        value = 2**n * mpmath.gamma(1 + 1 / mp_p) ** n / mpmath.gamma(1 + n / mp_p) * _mp(stretch)
        return Scalar.approx(float(value), GAMMA_ERROR * float(value))


def polytope_moment(spec: NormSpec, alpha: Sequence[int]) -> Scalar:
    """
    Exact normalized moment of a polytope ball, integrating y^α over the fan triangulation.
    """
    assert isinstance(spec, NormSpec) and spec.kind == "polytope"
    alpha = MultiIndex(alpha)
    if alpha.n != spec.n:
        raise InvalidInput("multi-index {} for dimension {}".format(tuple(alpha), spec.n))
    if alpha.order % 2 or (alpha.has_odd_component() and spec.is_axis_symmetric()):
        return Scalar.exact(0)
    monomial = Polynomial.monomial(alpha)
    total = sum((s.integrate(monomial) for s in spec.triangulate()), Fraction(0))
    return Scalar.exact(total / spec.volume_exact)


def _sample_box(spec: NormSpec, center: np.ndarray, r: float, count: int, rng: np.random.Generator):
    half = np.array([float(h) for h in spec.half_widths]) * r
    points = rng.uniform(center - half, center + half, size=(count, spec.n))
    accepted = spec.gauge_many((points - center) / r) < 1
    return points[accepted]


def mc_moment(spec: NormSpec, alpha: Sequence[int], samples: int, seed: int) -> Scalar:
    """
    Monte-Carlo estimate of M_α by rejection sampling from the bounding box of the ball.
    Batch k draws from the generator seeded with (seed, k), so the estimate only depends on seed and samples.
    The error bound is four sample standard errors.

    :raises DegenerateBody: if fewer than one in a thousand samples is accepted
    """
    assert isinstance(spec, NormSpec)
    alpha = MultiIndex(alpha)
    if alpha.n != spec.n:
        raise InvalidInput("multi-index {} for dimension {}".format(tuple(alpha), spec.n))
    if samples < MIN_SAMPLES:
        raise InvalidInput("at least {} samples are needed, got {}".format(MIN_SAMPLES, samples))

    exponents = np.array(alpha)
    center = np.zeros(spec.n)
    total = total_sq = 0.0
    accepted = 0
    for batch, start in enumerate(range(0, samples, MC_BATCH)):
        rng = np.random.default_rng([seed, batch])
        points = _sample_box(spec, center, 1.0, min(MC_BATCH, samples - start), rng)
        values = np.prod(points**exponents, axis=1)
        total += values.sum()
        total_sq += (values**2).sum()
        accepted += len(values)

    if accepted < MIN_ACCEPTANCE * samples:
        raise DegenerateBody("only {} of {} samples fell into {}".format(accepted, samples, spec))
    mean = total / accepted
    var = max(total_sq - total * total / accepted, 0.0) / max(accepted - 1, 1)
    return Scalar.approx(mean, 4 * np.sqrt(var / accepted))


class MomentTable(Cacheable):
    """
    Normalized moments M_α of a unit ball for all |α| ≤ max_order, together with the ball's volume.
    Use :meth:`build` to compute one.
    """

    def __init__(self, norm: NormSpec, max_order: int, entries: dict[MultiIndex, Scalar], volume: Scalar):
        assert isinstance(norm, NormSpec)
        assert isinstance(max_order, int)
        self._norm: NormSpec = norm
        self._max_order: int = max_order
        self._entries: dict[MultiIndex, Scalar] = entries
        self._volume: Scalar = volume

    @classmethod
    def build(cls, norm: NormSpec, max_order: int) -> MomentTable:
        """
        :param max_order: rounded up to the next even number
        """
        assert isinstance(norm, NormSpec)
        if max_order < 0:
            raise InvalidInput("moment order must be non-negative, got {}".format(max_order))
        max_order += max_order % 2
        entries = {}
        for alpha in indices_up_to(norm.n, max_order):
            if norm.kind == "lp":
                entries[alpha] = lp_moment(norm.p, norm.n, alpha, norm.scales)
            else:
                entries[alpha] = polytope_moment(norm, alpha)
        volume = lp_volume(norm) if norm.kind == "lp" else Scalar.exact(norm.volume_exact)
        log.debug("moment table for %s up to order %d: %d entries", norm, max_order, len(entries))
        return cls(norm, max_order, entries, volume)

    @staticmethod
    def make_key(norm: NormSpec, max_order: int) -> str:
        return "moments:{}:o{}".format(norm.key, max_order + max_order % 2)

    @property
    def key(self) -> str:
        return self.make_key(self._norm, self._max_order)

    @property
    def norm(self) -> NormSpec:
        return self._norm

    @property
    def n(self) -> int:
        return self._norm.n

    @property
    def max_order(self) -> int:
        return self._max_order

    @property
    def volume(self) -> Scalar:
        return self._volume

    @property
    def is_exact(self) -> bool:
        return all(v.is_exact for v in self._entries.values())

    def entries(self) -> dict[MultiIndex, Scalar]:
        return self._entries.copy()

    def moment(self, alpha: Sequence[int]) -> Scalar:
        alpha = MultiIndex(alpha)
        if alpha.order > self._max_order:
            raise InsufficientMomentOrder(
                "moment of order {} requested from a table of order {}".format(alpha.order, self._max_order)
            )
        return self._entries[alpha]

    def unnormalized(self) -> MomentTable:
        """
        the table of plain integrals ∫_{B(0,1)} y^α dy, with the volume kept
        """
        return MomentTable(
            self._norm,
            self._max_order,
            {alpha: m * self._volume for alpha, m in self._entries.items()},
            self._volume,
        )

    def to_dict(self) -> dict:
        return {
            "norm": self._norm.to_dict(),
            "max_order": self._max_order,
            "volume": self._volume.to_dict(),
            "entries": [{"alpha": list(alpha), "value": m.to_dict()} for alpha, m in self._entries.items()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> MomentTable:
        return cls(
            norm=NormSpec.from_dict(data["norm"]),
            max_order=data["max_order"],
            entries={MultiIndex(e["alpha"]): Scalar.from_dict(e["value"]) for e in data["entries"]},
            volume=Scalar.from_dict(data["volume"]),
        )


def coefficient_A(alpha: Sequence[int], table: MomentTable) -> Scalar:
    """
    A_α = binom(|α|, α) M_α, the volume normalized coefficient of the mean value system
    """
    alpha = MultiIndex(alpha)
    return table.moment(alpha) * alpha.binomial


def f_ratio(p: float) -> float:
    """
    Γ(3/p)² / (Γ(5/p) Γ(1/p)); equals 1/3 exactly at p = 2, where the fourth order operator of ℓᵖ reduces to Δ²
    """
    if not isfinite(p) or p < 1:
        raise InvalidNorm("f is defined for finite p ≥ 1, got {}".format(p))
    with mpmath.workdps(WORKING_DPS):
        return float(_f_mp(_mp(as_rational(p))))


def _f_mp(p):
    return mpmath.gamma(3 / p) ** 2 / (mpmath.gamma(5 / p) * mpmath.gamma(1 / p))


def f_ratio_derivative(p: float) -> float:
    """
    closed form f'(p) = f(p) (-6Ψ(3/p) + 5Ψ(5/p) + Ψ(1/p)) / p²
    """
    with mpmath.workdps(WORKING_DPS):
        mp_p = _mp(as_rational(p))
        psi = mpmath.digamma
        return float(_f_mp(mp_p) * (-6 * psi(3 / mp_p) + 5 * psi(5 / mp_p) + psi(1 / mp_p)) / mp_p**2)


def f_ratio_numeric_derivative(p: float) -> float:
    with mpmath.workdps(WORKING_DPS):
        return float(mpmath.diff(_f_mp, _mp(as_rational(p))))


@dataclass
class FRatioScan:
    grid: list[float]
    values: list[float]
    strictly_increasing: bool
    crossing_interval: tuple[float, float] | None
    crossing: float | None
    derivative_deviation: float
    rows: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "strictly_increasing": self.strictly_increasing,
            "crossing_interval": None if self.crossing_interval is None else list(self.crossing_interval),
            "crossing": self.crossing,
            "derivative_deviation": self.derivative_deviation,
            "rows": self.rows,
        }

    def to_csv(self) -> str:
        return "p,f,df,df_numeric\n" + "".join("{!r},{!r},{!r},{!r}\n".format(r["p"], r["f"], r["df"], r["df_numeric"]) for r in self.rows)


def f_ratio_scan(grid: Sequence[float]) -> FRatioScan:
    """
    Evaluate f on a grid, check strict increase between consecutive points, locate the crossing of 1/3 and compare
    the numerical derivative with the digamma closed form.
    """
    grid = [float(p) for p in grid]
    if sorted(grid) != grid or len(set(grid)) != len(grid):
        raise InvalidInput("the grid must be strictly increasing")
    values = [f_ratio(p) for p in grid]
    rows = []
    deviation = 0.0
    for p, v in zip(grid, values):
        closed = f_ratio_derivative(p)
        numeric = f_ratio_numeric_derivative(p)
        deviation = max(deviation, abs(closed - numeric))
        rows.append({"p": p, "f": v, "df": closed, "df_numeric": numeric})
    increasing = all(a < b for a, b in zip(values, values[1:]))

    interval = None
    crossing = None
    third = 1.0 / 3.0
    for (p0, v0), (p1, v1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if v0 == third:
            interval = (p0, p0)
        elif v1 == third:
            interval = (p1, p1)
        elif (v0 - third) * (v1 - third) < 0:
            interval = (p0, p1)
        if interval is not None:
            break
    if interval is not None and interval[0] == interval[1]:
        crossing = interval[0]
    elif interval is not None:
        with mpmath.workdps(WORKING_DPS):
            crossing = float(
                mpmath.findroot(lambda q: _f_mp(q) - mpmath.mpf(1) / 3, (interval[0], interval[1]), solver="illinois")
            )
    if not increasing:
        log.warning("f is not strictly increasing on the grid")
    return FRatioScan(grid, values, increasing, interval, crossing, deviation, rows)


def symbol_matrix(table: MomentTable) -> list[list[Scalar]]:
    """
    the symmetric matrix S of the order 2 symbol Σ_{|α|=2} A_α ξ^α = ξᵀ S ξ
    """
    n = table.n
    rows = []
    for i in range(n):
        row = []
        for k in range(n):
            if i == k:
                row.append(coefficient_A(MultiIndex.unit(n, i).scaled(2), table))
            else:
                row.append(coefficient_A(MultiIndex.unit(n, i) + MultiIndex.unit(n, k), table) * Fraction(1, 2))
        rows.append(row)
    return rows


def _leading_minors(matrix: sympy.Matrix) -> list[sympy.Rational]:
    return [matrix[:k, :k].det(method="bareiss") for k in range(1, matrix.rows + 1)]


def _smallest_rational_eigenvalue(matrix: sympy.Matrix, estimate: float) -> Fraction | None:
    lam = sympy.Symbol("lam")
    _, factors = sympy.factor_list(matrix.charpoly(lam).as_expr(), lam, domain="QQ")
    for factor, _ in factors:
        poly = sympy.Poly(factor, lam)
        if poly.degree() != 1:
            continue
        a, b = poly.all_coeffs()
        root = -sympy.Rational(b) / sympy.Rational(a)
        if abs(float(root) - estimate) <= EIGENVALUE_MATCH * max(1.0, abs(estimate)):
            return Fraction(int(root.p), int(root.q))
    return None


def ellipticity_certificate(table: MomentTable) -> Scalar:
    """
    Minimum eigenvalue of the order 2 symbol. Exact when the table is exact and the eigenvalue is rational.
    For exact tables positivity is decided by the leading principal minors.

    :raises EllipticityFailure: if the minimum eigenvalue is not certainly positive
    """
    if table.max_order < 2:
        raise InsufficientMomentOrder("the ellipticity certificate needs moments of order 2")
    matrix = symbol_matrix(table)
    floats = np.array([[float(s) for s in row] for row in matrix])
    estimate = float(np.linalg.eigvalsh(floats).min())
    if all(s.is_exact for row in matrix for s in row):
        exact = sympy.Matrix([[sympy.Rational(s.value.numerator, s.value.denominator) for s in row] for row in matrix])
        if not all(m > 0 for m in _leading_minors(exact)):
            raise EllipticityFailure("order 2 symbol of {} is not positive definite".format(table.norm))
        smallest = _smallest_rational_eigenvalue(exact, estimate)
        if smallest is not None:
            result = Scalar.exact(smallest)
        else:
            # backward stable symmetric eigensolver
            result = Scalar.approx(estimate, table.n * np.finfo(float).eps * float(np.abs(floats).sum()))
    else:
        # Weyl: eigenvalues move by at most the Frobenius norm of the perturbation
        perturbation = float(np.sqrt(sum(s.error**2 for row in matrix for s in row)))
        result = Scalar.approx(estimate, perturbation + 1e-15)
        if not result.is_positive():
            raise EllipticityFailure("order 2 symbol of {} has minimum eigenvalue {}".format(table.norm, result))
    log.debug("ellipticity certificate for %s: %s", table.norm, result)
    return result
