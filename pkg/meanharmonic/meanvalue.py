from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
import logging

import numpy as np

from .errors import DegenerateBody, DimensionMismatch, InadmissibleProbe, InsufficientMomentOrder, InvalidInput, InvalidNorm, WeightNotPositive
from .moments import MC_BATCH, MIN_ACCEPTANCE, MIN_SAMPLES, MomentTable, _sample_box
from .norms import INF, NormSpec
from .polycore import Polynomial, Rational, as_rational, format_rational, indices_of_order
from .scalar import Scalar

log = logging.getLogger(__name__)

Point = Sequence[Rational | float | str]
Box = tuple[tuple[Fraction, Fraction], ...]

ORACLES = ("pizzetti", "exact-pizzetti", "mc", "exact")
DEFAULT_SAMPLES = 1_000_000
POSITIVITY_SAMPLES = 256
MAX_PROBE_ATTEMPTS = 1000
ROUNDING = 4 * np.finfo(float).eps


def default_box(n: int) -> Box:
    return ((Fraction(-2), Fraction(2)),) * n


def _point(x: Point, n: int) -> tuple[Fraction, ...]:
    if len(x) != n:
        raise DimensionMismatch("point {} for dimension {}".format(tuple(x), n))
    return tuple(as_rational(c) for c in x)


def _radius(r: Rational | float | str) -> Fraction:
    r = as_rational(r)
    if r <= 0:
        raise InvalidInput("radius must be positive, got {}".format(format_rational(r)))
    return r


# oracles


def pizzetti_mean(f: Polynomial, table: MomentTable, x: Point, r: Rational | float | str) -> Scalar:
    """
    The mean of f over the ball B(x, r) by the finite Pizzetti sum

        Σ_α D^α f(x) r^|α| M_α / α!

    which is exact for polynomials. Terms of odd order vanish since the ball is centrally symmetric.

    :raises InsufficientMomentOrder: if the table does not reach the even part of deg f
    """
    assert isinstance(f, Polynomial)
    assert isinstance(table, MomentTable)
    if f.n != table.n:
        raise DimensionMismatch("polynomial in {} variables, moment table for dimension {}".format(f.n, table.n))
    x = _point(x, f.n)
    r = _radius(r)
    top = f.degree - f.degree % 2
    if top > table.max_order:
        raise InsufficientMomentOrder("a mean of degree {} needs moments up to order {}, table has {}".format(f.degree, top, table.max_order))

    total = Scalar.exact(0)
    magnitude = 0.0
    for order in range(0, top + 1, 2):
        for alpha in indices_of_order(f.n, order):
            moment = table.moment(alpha)
            if moment.is_zero() and moment.is_exact:
                continue
            value = f.derivative(alpha).evaluate(x)
            if value == 0:
                continue
            term = moment * (value * r**order / alpha.factorial)
            magnitude += abs(float(term))
            total = total + term
    if not total.is_exact:
        # float rounding of the summation
        total = total + Scalar.approx(0.0, ROUNDING * magnitude)
    return total


def weighted_mean(u: Polynomial, w: Polynomial, table: MomentTable, x: Point, r: Rational | float | str) -> Scalar:
    """
    ⨍ u w / ⨍ w over B(x, r), both means by :func:`pizzetti_mean`

    :raises WeightNotPositive: if the mean of w is not certainly positive
    """
    denominator = pizzetti_mean(w, table, x, r)
    if not denominator.is_positive():
        raise WeightNotPositive("mean of the weight {} over B({}, {}) is {}".format(w, _fmt(x), r, denominator))
    return pizzetti_mean(u * w, table, x, r) / denominator


def evaluate_many(p: Polynomial, points: np.ndarray) -> np.ndarray:
    """
    float values of p at the rows of an (N, n) array
    """
    result = np.zeros(len(points))
    for alpha, c in p.terms.items():
        result += float(c) * np.prod(points ** np.array(alpha), axis=1)
    return result


def mc_mean(
    u: Polynomial,
    w: Polynomial,
    spec: NormSpec,
    x: Point,
    r: Rational | float | str,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    probe: int = 0,
) -> Scalar:
    """
    Monte-Carlo ratio estimate of ⨍ u w / ⨍ w over B(x, r), by rejection sampling in the bounding box of the ball.
    Batch k of probe i draws from the generator seeded with (seed, i, k). The error bound is four standard errors
    of the ratio estimator (delta method).

    :raises WeightNotPositive: naming the first accepted sample where w ≤ 0
    :raises DegenerateBody: if fewer than one in a thousand samples is accepted
    """
    assert isinstance(spec, NormSpec)
    if u.n != spec.n or w.n != spec.n:
        raise DimensionMismatch("polynomials in {}, {} variables for a norm on dimension {}".format(u.n, w.n, spec.n))
    if samples < MIN_SAMPLES:
        raise InvalidInput("at least {} samples are needed, got {}".format(MIN_SAMPLES, samples))
    center = np.array([float(c) for c in _point(x, spec.n)])
    r = float(_radius(r))

    uw_parts, w_parts = [], []
    for batch, start in enumerate(range(0, samples, MC_BATCH)):
        rng = np.random.default_rng([seed, probe, batch])
        points = _sample_box(spec, center, r, min(MC_BATCH, samples - start), rng)
        weights = evaluate_many(w, points)
        bad = np.flatnonzero(weights <= 0)
        if len(bad):
            raise WeightNotPositive("weight {} is {} at the sample point {}".format(w, weights[bad[0]], tuple(points[bad[0]])))
        uw_parts.append(evaluate_many(u, points) * weights)
        w_parts.append(weights)

    a = np.concatenate(uw_parts)
    b = np.concatenate(w_parts)
    if len(b) < max(MIN_ACCEPTANCE * samples, 2):
        raise DegenerateBody("only {} of {} samples fell into the ball around {}".format(len(b), samples, tuple(center)))
    ratio = a.sum() / b.sum()
    spread = np.std(a - ratio * b, ddof=1)
    error = 4 * spread / (np.sqrt(len(b)) * b.mean())
    log.debug("mc mean over %d accepted samples: %r ± %.2e", len(b), ratio, error)
    return Scalar.approx(float(ratio), float(error))


def as_polytope(spec: NormSpec) -> NormSpec:
    """
    the polytope ball of ℓ¹ and ℓ^∞ norms (axis scales included); polytopes are returned unchanged
    """
    if spec.kind == "polytope":
        return spec
    n = spec.n
    if spec.p == 1:
        vertices = []
        for i, a in enumerate(spec.scales):
            for sign in (1, -1):
                vertices.append(tuple(sign * a if k == i else Fraction(0) for k in range(n)))
        return NormSpec.polytope(vertices)
    if spec.p == INF:
        return NormSpec.polytope([tuple(s * a for s, a in zip(signs, spec.scales)) for signs in product((1, -1), repeat=n)])
    raise InvalidNorm("{} has no polytope ball; the exact oracle needs a polytope, ℓ¹ or ℓ^∞ norm".format(spec))


def exact_polytope_mean(u: Polynomial, w: Polynomial, spec: NormSpec, x: Point, r: Rational | str) -> Fraction:
    """
    ∫ u w / ∫ w over the ball B(x, r) = x + r·K, integrated exactly over the fan triangulation of K.

    :raises WeightNotPositive: if the integral of w is not positive
    """
    polytope = as_polytope(spec)
    if u.n != polytope.n or w.n != polytope.n:
        raise DimensionMismatch("polynomials in {}, {} variables for a norm on dimension {}".format(u.n, w.n, polytope.n))
    x = _point(x, polytope.n)
    r = _radius(r)
    # the factor rⁿ of the substitution cancels in the ratio
    uw = (u * w).translate_scale(x, r)
    ww = w.translate_scale(x, r)
    simplices = polytope.triangulate()
    denominator = sum((s.integrate(ww) for s in simplices), Fraction(0))
    if denominator <= 0:
        raise WeightNotPositive("integral of the weight {} over B({}, {}) is {}".format(w, _fmt(x), format_rational(r), format_rational(denominator)))
    return sum((s.integrate(uw) for s in simplices), Fraction(0)) / denominator


# probes


def check_admissible(spec: NormSpec, x: Point, r: Rational | float | str, box: Box) -> bool:
    """
    True iff the bounding box of the closed ball B(x, r) lies in the open domain box
    """
    x = _point(x, spec.n)
    r = _radius(r)
    return all(lo < c - r * h and c + r * h < hi for c, h, (lo, hi) in zip(x, spec.half_widths, box))


def random_probes(norm: NormSpec, n: int, count: int, seed: int = 0, box: Box | None = None) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """
    count admissible probes (center, radius) with rational coordinates of denominator 1000, reproducible per seed
    """
    if n != norm.n:
        raise DimensionMismatch("probes in dimension {} for a norm on dimension {}".format(n, norm.n))
    box = default_box(n) if box is None else tuple((as_rational(lo), as_rational(hi)) for lo, hi in box)
    rng = np.random.default_rng(seed)
    grid = 1000
    probes = []
    attempts = 0
    while len(probes) < count:
        attempts += 1
        if attempts > MAX_PROBE_ATTEMPTS * max(count, 1):
            raise InvalidInput("no admissible ball with denominator {} found in the domain box {}".format(grid, _fmt_box(box)))
        center = tuple(Fraction(round(rng.uniform(float(lo), float(hi)) * grid), grid) for lo, hi in box)
        room = min(min(c - lo, hi - c) / h for c, h, (lo, hi) in zip(center, norm.half_widths, box))
        r = Fraction(int(rng.uniform(0.1, 0.9) * float(room) * grid), grid)
        if r > 0 and check_admissible(norm, center, r, box):
            probes.append((center, r))
    return probes


def _fmt(x: Sequence[Fraction]) -> str:
    return "(" + ", ".join(format_rational(c) for c in x) + ")"


def _fmt_box(box: Box) -> str:
    return " x ".join("({}, {})".format(format_rational(lo), format_rational(hi)) for lo, hi in box)


@dataclass
class ProbeResult:
    center: tuple[Fraction, ...]
    radius: Fraction
    claimed: Fraction
    measured: Scalar | None
    status: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def residual(self) -> float | None:
        if self.measured is None:
            return None
        if self.measured.is_exact:
            return float(abs(self.measured.value - self.claimed))
        return abs(float(self.measured) - float(self.claimed))

    def to_dict(self) -> dict:
        return {
            "center": [format_rational(c) for c in self.center],
            "radius": format_rational(self.radius),
            "claimed": format_rational(self.claimed),
            "measured": None if self.measured is None else self.measured.to_dict(),
            "abs_error": None if self.measured is None else self.measured.error,
            "residual": self.residual,
            "status": self.status,
        }


@dataclass
class VerificationReport:
    """
    Comparison of u(x) with the weighted mean of u over every probed ball. A probe passes iff the distance is
    within the oracle's error bound (zero for exact oracles).
    """

    u: Polynomial
    w: Polynomial
    norm: NormSpec
    oracle: str
    probes: list[ProbeResult] = field(default_factory=list)
    note: str | None = None

    @property
    def status(self) -> str:
        statuses = {p.status for p in self.probes}
        if "fail" in statuses:
            return "fail"
        if "pass" in statuses:
            return "pass"
        return "inapplicable"

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def failures(self) -> list[ProbeResult]:
        return [p for p in self.probes if p.status == "fail"]

    def to_dict(self) -> dict:
        ret = {
            "candidate": str(self.u),
            "weight": str(self.w),
            "norm": self.norm.to_dict(),
            "oracle": self.oracle,
            "status": self.status,
            "passed": self.passed,
            "probes": [p.to_dict() for p in self.probes],
        }
        if self.note is not None:
            ret["note"] = self.note
        return ret


def _table_for(spec: NormSpec, degree: int) -> MomentTable:
    return MomentTable.build(spec, max(degree, 0))


def verify_strongly_harmonic(
    u: Polynomial,
    w: Polynomial,
    spec: NormSpec,
    probes: Sequence[tuple[Point, Rational | float | str]],
    oracle: str = "pizzetti",
    box: Box | None = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    table: MomentTable | None = None,
    tolerance: float = 0.0,
) -> VerificationReport:
    """
    Check u(x) = ⨍_{B(x,r)} u w / ⨍_{B(x,r)} w on every probe with one of the oracles

    - ``pizzetti`` (alias ``exact-pizzetti``): finite Pizzetti sums over the moment table
    - ``exact``: exact integration over the triangulated polytope ball
    - ``mc``: Monte-Carlo with a four sigma error band

    :param tolerance: added to the oracle's error bound
    :raises InadmissibleProbe: listing every probe whose ball is not inside the domain box
    """
    assert isinstance(u, Polynomial) and isinstance(w, Polynomial)
    assert isinstance(spec, NormSpec)
    if oracle not in ORACLES:
        raise InvalidInput("unknown oracle {!r}, expected one of {}".format(oracle, ", ".join(ORACLES)))
    if u.n != spec.n or w.n != spec.n:
        raise DimensionMismatch("polynomials in {}, {} variables for a norm on dimension {}".format(u.n, w.n, spec.n))
    box = default_box(spec.n) if box is None else box
    probes = [(_point(x, spec.n), _radius(r)) for x, r in probes]

    bad = [(x, r) for x, r in probes if not check_admissible(spec, x, r, box)]
    if bad:
        raise InadmissibleProbe(
            "balls not inside the domain box: {}".format(", ".join("B({}, {})".format(_fmt(x), format_rational(r)) for x, r in bad))
        )

    if oracle in ("pizzetti", "exact-pizzetti") and table is None:
        table = _table_for(spec, u.degree + w.degree)
    if oracle == "exact":
        spec_exact = as_polytope(spec)

    report = VerificationReport(u, w, spec, oracle)
    for index, (x, r) in enumerate(probes):
        claimed = u.evaluate(x)
        if oracle == "mc":
            measured = mc_mean(u, w, spec, x, r, samples, seed, index)
        elif oracle == "exact":
            measured = Scalar.exact(exact_polytope_mean(u, w, spec_exact, x, r))
        else:
            measured = weighted_mean(u, w, table, x, r)
        if tolerance:
            measured = measured + Scalar.approx(0.0, tolerance)
        status = "pass" if measured.agrees(claimed) else "fail"
        report.probes.append(ProbeResult(x, r, claimed, measured, status))
        log.debug("probe B(%s, %s): u = %s, mean = %s, %s", _fmt(x), format_rational(r), format_rational(claimed), measured, status)

    log.info("%s against %s over %d probes: %s", u, oracle, len(probes), report.status)
    return report


def weight_positive_on_ball(w: Polynomial, spec: NormSpec, x: Point, r: Rational | float | str, seed: int = 0) -> bool:
    """
    w > 0 at the center and at POSITIVITY_SAMPLES seeded points of the ball; global positivity is not decided
    """
    x = _point(x, spec.n)
    if w.evaluate(x) <= 0:
        return False
    rng = np.random.default_rng([seed, 1])
    center = np.array([float(c) for c in x])
    points = _sample_box(spec, center, float(_radius(r)), 4 * POSITIVITY_SAMPLES, rng)[:POSITIVITY_SAMPLES]
    return bool(np.all(evaluate_many(w, points) > 0))


def iterated_weight_check(
    u: Polynomial,
    w: Polynomial,
    l_max: int,
    probes: Sequence[tuple[Point, Rational | float | str]],
    spec: NormSpec | None = None,
    oracle: str = "pizzetti",
    box: Box | None = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> list[VerificationReport]:
    """
    Verify u against each of the weights w, Δw, …, Δ^{l_max}w on the balls of the probes (Euclidean unless spec is given).
    A probe whose ball carries no positive Δˡw (checked at sample points) is reported inapplicable for that l,
    and so is every probe once Δˡw vanishes identically.
    """
    if l_max < 0:
        raise InvalidInput("l_max must be non-negative, got {}".format(l_max))
    spec = NormSpec.lp(2, u.n) if spec is None else spec
    table = _table_for(spec, u.degree + w.degree) if oracle in ("pizzetti", "exact-pizzetti") else None

    reports = []
    weight = w
    for l in range(l_max + 1):
        if l:
            weight = weight.laplacian()
        report = VerificationReport(u, weight, spec, oracle)
        if weight.is_zero():
            report.note = "Δ^{}w vanishes".format(l)
            report.probes = [ProbeResult(_point(x, spec.n), _radius(r), u.evaluate(_point(x, spec.n)), None, "inapplicable") for x, r in probes]
            reports.append(report)
            continue
        applicable = [(x, r) for x, r in probes if weight_positive_on_ball(weight, spec, x, r, seed)]
        if len(applicable) < len(probes):
            log.warning("Δ^%d w = %s is not positive on %d of %d probed balls", l, weight, len(probes) - len(applicable), len(probes))
        checked = iter(
            verify_strongly_harmonic(u, weight, spec, applicable, oracle, box, samples, seed, table).probes if applicable else []
        )
        for x, r in probes:
            if (x, r) in applicable:
                report.probes.append(next(checked))
            else:
                x = _point(x, spec.n)
                report.probes.append(ProbeResult(x, _radius(r), u.evaluate(x), None, "inapplicable"))
        reports.append(report)
    return reports
