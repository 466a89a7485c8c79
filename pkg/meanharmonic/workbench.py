from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
import logging

from .cache import Cache
from .errors import InvalidInput
from .kernel import BoseReport, KernelBasis, ScanReport, bose_equivalence, kernel_basis
from .meanvalue import DEFAULT_SAMPLES, Box, VerificationReport, iterated_weight_check, pizzetti_mean, random_probes, verify_strongly_harmonic
from .moments import FRatioScan, MomentTable, ellipticity_certificate, f_ratio_scan
from .norms import NormSpec
from .pde import assemble_general, default_j_list
from .polycore import Polynomial, Rational
from .scalar import Scalar

log = logging.getLogger(__name__)


def _even_up(k: int) -> int:
    return k + k % 2


class Workbench:
    """
    standard interface to the library; moment tables and kernel bases are kept in a :class:`Cache`

    :param cache_dir: directory to store computed tables and bases in as JSON (None to keep them in memory only)
    """

    def __init__(self, cache_dir: str | None = None):
        assert isinstance(cache_dir, (str | None))
        self._cache = Cache(cache_dir=cache_dir)

    @property
    def cache(self) -> Cache:
        return self._cache

    def moment_table(self, norm: NormSpec, max_order: int) -> MomentTable:
        """
        :param max_order: rounded up to an even order
        """
        assert isinstance(norm, NormSpec)
        assert isinstance(max_order, int)
        max_order = _even_up(max_order)
        return self._cache.get(MomentTable.make_key(norm, max_order), MomentTable, lambda: MomentTable.build(norm, max_order))

    def basis(self, norm: NormSpec, w: Polynomial, degree: int, j_list: Sequence[int] | None = None) -> KernelBasis:
        """
        strongly harmonic polynomials of degree ≤ degree for the norm and the weight w

        :raises AmbiguousRank: for approximate moment tables without a clear spectral gap
        """
        assert isinstance(norm, NormSpec)
        assert isinstance(w, Polynomial)
        j_list = default_j_list(degree, w) if j_list is None else list(j_list)

        def compute() -> KernelBasis:
            table = self.moment_table(norm, max(j_list))
            return kernel_basis(assemble_general(w, table, j_list, degree))

        return self._cache.get(KernelBasis.make_key("general", norm, w, degree, j_list), KernelBasis, compute)

    def scan(self, norm: NormSpec, w: Polynomial, degrees: Sequence[int]) -> ScanReport:
        """
        kernel dimension per degree; stabilized when the last three dimensions agree
        """
        degrees = list(degrees)
        if not degrees or any(b <= a for a, b in zip(degrees, degrees[1:])):
            raise InvalidInput("degrees must be a non-empty increasing sequence, got {}".format(degrees))
        return ScanReport.from_rows([(d, self.basis(norm, w, d).dimension) for d in degrees], norm, w)

    def probes(self, norm: NormSpec, count: int, seed: int = 0, box: Box | None = None) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        return random_probes(norm, norm.n, count, seed, box)

    def verify(
        self,
        u: Polynomial,
        w: Polynomial,
        norm: NormSpec,
        probes: Sequence[tuple[Sequence[Rational], Rational]],
        oracle: str = "pizzetti",
        box: Box | None = None,
        samples: int = DEFAULT_SAMPLES,
        seed: int = 0,
        tolerance: float = 0.0,
    ) -> VerificationReport:
        table = None
        if oracle in ("pizzetti", "exact-pizzetti"):
            table = self.moment_table(norm, u.degree + w.degree)
        return verify_strongly_harmonic(u, w, norm, probes, oracle, box, samples, seed, table, tolerance)

    def verify_iterated(
        self,
        u: Polynomial,
        w: Polynomial,
        norm: NormSpec,
        l_max: int,
        probes: Sequence[tuple[Sequence[Rational], Rational]],
        oracle: str = "pizzetti",
        box: Box | None = None,
        samples: int = DEFAULT_SAMPLES,
        seed: int = 0,
    ) -> list[VerificationReport]:
        """
        checks against w, Δw, …, Δ^{l_max}w on the balls of the norm
        """
        assert isinstance(norm, NormSpec)
        return iterated_weight_check(u, w, l_max, probes, norm, oracle, box, samples, seed)

    def pizzetti(self, f: Polynomial, norm: NormSpec, x: Sequence[Rational], r: Rational) -> Scalar:
        return pizzetti_mean(f, self.moment_table(norm, f.degree), x, r)

    def ellipticity(self, norm: NormSpec) -> Scalar:
        return ellipticity_certificate(self.moment_table(norm, 2))

    def bose_report(self, w: Polynomial, degree: int, l: int | None = None) -> BoseReport:
        return bose_equivalence(w, degree, l)

    def f_scan(self, grid: Sequence[float]) -> FRatioScan:
        return f_ratio_scan(grid)
