from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
import logging

import numpy as np

from .abc import Cacheable
from .errors import AmbiguousRank, InvalidInput
from .moments import MomentTable
from .norms import NormSpec
from .pde import (
    PdeSystemMatrix,
    assemble_bose,
    assemble_general,
    assemble_iterated_laplace,
    bose_closure_order,
    default_j_list,
    laplace_eigenvalue,
)
from .polycore import MultiIndex, Polynomial, grlex_key

log = logging.getLogger(__name__)

RANK_THRESHOLD = 1e-9
MIN_SPECTRAL_GAP = 1e3
PIVOT_THRESHOLD = 1e-8
MAX_DENOMINATOR = 10**6


def bareiss_echelon(rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """
    Fraction-free (Bareiss) row echelon form of an integer matrix. Every division is exact.

    :return: the echelon rows (rank many) and their pivot columns
    """
    m = [row.copy() for row in rows]
    if not m:
        return [], []
    n_rows, n_cols = len(m), len(m[0])
    prev = 1
    r = 0
    pivots = []
    for c in range(n_cols):
        if r == n_rows:
            break
        for i in range(r, n_rows):
            if m[i][c] != 0:
                break
        else:
            continue
        if i != r:
            m[r], m[i] = m[i], m[r]
        pivot = m[r][c]
        for i in range(r + 1, n_rows):
            factor = m[i][c]
            row_i, row_r = m[i], m[r]
            for k in range(c + 1, n_cols):
                q, rem = divmod(pivot * row_i[k] - factor * row_r[k], prev)
                assert rem == 0, "inexact Bareiss division"
                row_i[k] = q
            row_i[c] = 0
        prev = pivot
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _integer_rows(rows: list[list[Fraction]]) -> list[list[int]]:
    # scaling a row does not change the kernel
    result = []
    for row in rows:
        if all(x == 0 for x in row):
            continue
        scale = lcm(*(x.denominator for x in row))
        result.append([int(x * scale) for x in row])
    return result


def nullspace_exact(rows: list[list[Fraction]], n_cols: int) -> list[list[Fraction]]:
    """
    a basis of {c : M c = 0} by Bareiss elimination and back substitution
    """
    echelon, pivots = bareiss_echelon(_integer_rows(rows))
    pivot_set = set(pivots)
    basis = []
    for free in (c for c in range(n_cols) if c not in pivot_set):
        x = [Fraction(0)] * n_cols
        x[free] = Fraction(1)
        for row, p in reversed(list(zip(echelon, pivots))):
            s = sum((row[k] * x[k] for k in range(p + 1, n_cols) if row[k] and x[k]), Fraction(0))
            x[p] = -s / row[p]
        basis.append(x)
    return basis


def rref_exact(vectors: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """
    reduced row echelon form with monic pivots (Gauss-Jordan over the rationals)
    """
    m = [list(v) for v in vectors]
    if not m:
        return [], []
    n_cols = len(m[0])
    r = 0
    pivots = []
    for c in range(n_cols):
        pivot_row = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rref_float(vectors: np.ndarray) -> np.ndarray:
    """
    reduced row echelon form of a float matrix with partial pivoting inside each column
    """
    m = np.array(vectors, dtype=float)
    if m.size == 0:
        return m
    r = 0
    for c in range(m.shape[1]):
        if r == m.shape[0]:
            break
        i = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[i, c]) < PIVOT_THRESHOLD:
            m[r:, c] = 0.0
            continue
        m[[r, i]] = m[[i, r]]
        m[r] /= m[r, c]
        for k in range(m.shape[0]):
            if k != r:
                m[k] -= m[k, c] * m[r]
        r += 1
    return m[:r]


def _descending(columns: list[MultiIndex]) -> list[int]:
    # positions of the columns in descending graded lexicographic order
    return sorted(range(len(columns)), key=lambda k: grlex_key(columns[k]), reverse=True)


@dataclass
class KernelBasis(Cacheable):
    """
    Canonical basis of the polynomial solutions of a system: reduced row echelon form over the monomials in
    descending graded lexicographic order, with monic pivots (the leading coefficient of every member is 1).
    Members are listed by ascending leading monomial.
    """

    polynomials: list[Polynomial]
    n: int
    degree: int
    weight: Polynomial
    j_list: list[int]
    system: str
    norm: NormSpec | None = None
    exact: bool = True
    spectral_gap: float | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.polynomials)

    @property
    def key(self) -> str:
        return self.make_key(self.system, self.norm, self.weight, self.degree, self.j_list)

    @staticmethod
    def make_key(system: str, norm: NormSpec | None, weight: Polynomial, degree: int, j_list: Sequence[int]) -> str:
        norm_key = norm.key if norm is not None else "n{}".format(weight.n)
        return "basis:{}:{}:w{}:D{}:j{}".format(
            system, norm_key, str(weight).replace(" ", ""), degree, "-".join(str(j) for j in j_list)
        )

    def contains(self, p: Polynomial) -> bool:
        """
        exact membership of p in the span of the basis
        """
        return span_contains(self.polynomials, p)

    def same_span(self, other: KernelBasis | Sequence[Polynomial]) -> bool:
        others = other.polynomials if isinstance(other, KernelBasis) else list(other)
        return all(self.contains(p) for p in others) and all(span_contains(others, p) for p in self.polynomials)

    def to_dict(self) -> dict:
        ret = {
            "dimension": self.dimension,
            "basis": [str(p) for p in self.polynomials],
            "norm": None if self.norm is None else self.norm.to_dict(),
            "weight": str(self.weight),
            "degree": self.degree,
            "j_list": self.j_list,
            "system": self.system,
            "n": self.n,
            "exact": self.exact,
        }
        if self.spectral_gap is not None:
            # JSON has no infinity; no dropped singular value means an unbounded gap
            ret["spectral_gap"] = self.spectral_gap if np.isfinite(self.spectral_gap) else None
        ret.update(self.metadata)
        return ret

    @classmethod
    def from_dict(cls, data: dict) -> KernelBasis:
        n = data["n"]
        known = {"dimension", "basis", "norm", "weight", "degree", "j_list", "system", "n", "exact", "spectral_gap"}
        return cls(
            polynomials=[Polynomial.parse(p, n) for p in data["basis"]],
            n=n,
            degree=data["degree"],
            weight=Polynomial.parse(data["weight"], n),
            j_list=list(data["j_list"]),
            system=data["system"],
            norm=None if data["norm"] is None else NormSpec.from_dict(data["norm"]),
            exact=data["exact"],
            spectral_gap=data.get("spectral_gap"),
            metadata={k: v for k, v in data.items() if k not in known},
        )

    def __repr__(self):
        return "KernelBasis(dimension={}, {})".format(self.dimension, self.key)


def span_contains(polynomials: Sequence[Polynomial], p: Polynomial) -> bool:
    if p.is_zero():
        return True
    if not polynomials:
        return False
    monomials = sorted({g for q in list(polynomials) + [p] for g in q.terms}, key=grlex_key, reverse=True)
    base = [[q.coefficient(g) for g in monomials] for q in polynomials]
    _, pivots = rref_exact(base)
    _, extended = rref_exact(base + [[p.coefficient(g) for g in monomials]])
    return len(pivots) == len(extended)


def _basis_from_vectors(vectors: list[list[Fraction]], columns: list[MultiIndex], n: int) -> list[Polynomial]:
    order = _descending(columns)
    reordered = [[v[k] for k in order] for v in vectors]
    reduced, _ = rref_exact(reordered)
    polys = [Polynomial(n, {columns[k]: c for k, c in zip(order, row)}) for row in reduced]
    return list(reversed(polys))


def kernel_basis(matrix: PdeSystemMatrix, tau: float = RANK_THRESHOLD, min_gap: float = MIN_SPECTRAL_GAP) -> KernelBasis:
    """
    Canonical basis of the kernel of a system matrix. Exact matrices are reduced by fraction-free elimination;
    matrices with approximate entries by singular value decomposition with relative rank threshold tau.

    :raises AmbiguousRank: if the ratio between the smallest kept and the largest dropped singular value is below
        min_gap
    """
    assert isinstance(matrix, PdeSystemMatrix)
    columns = matrix.column_basis
    n = matrix.n
    metadata = {}
    if matrix.norm is not None and matrix.norm.isometry_count() is not None:
        metadata["isometry_count"] = matrix.norm.isometry_count()

    if matrix.is_exact:
        vectors = nullspace_exact(matrix.exact_rows(), len(columns))
        polys = _basis_from_vectors(vectors, columns, n)
        gap = None
        exact = True
    else:
        polys, gap = _kernel_svd(matrix, tau, min_gap)
        exact = False

    log.info("kernel of %r: dimension %d", matrix, len(polys))
    return KernelBasis(
        polynomials=polys,
        n=n,
        degree=matrix.degree,
        weight=matrix.weight,
        j_list=matrix.j_list,
        system=matrix.system,
        norm=matrix.norm,
        exact=exact,
        spectral_gap=gap,
        metadata=metadata,
    )


def _kernel_svd(matrix: PdeSystemMatrix, tau: float, min_gap: float) -> tuple[list[Polynomial], float]:
    a = matrix.float_array()
    scale = np.abs(a).max(axis=1) if a.size else np.zeros(0)
    errors = matrix.error_array()[scale > 0] / scale[scale > 0, None]
    a = a[scale > 0] / scale[scale > 0, None]
    n_cols = len(matrix.column_basis)
    if a.shape[0] == 0:
        null = np.eye(n_cols)
        gap = float("inf")
    else:
        _, s, vh = np.linalg.svd(a, full_matrices=True)
        # Weyl: singular values move by at most the Frobenius norm of the entry errors
        cut = max(tau * s[0], float(np.linalg.norm(errors)))
        rank = int(np.sum(s > cut)) if s[0] > 0 else 0
        if rank == len(s) or s[rank] == 0:
            gap = float("inf")
        elif rank == 0:
            gap = 0.0
        else:
            gap = float(s[rank - 1] / s[rank])
        log.debug("singular values kept down to %.3e, dropped from %.3e", s[rank - 1] if rank else 0.0, s[rank] if rank < len(s) else 0.0)
        if gap < min_gap:
            raise AmbiguousRank(
                "spectral gap {:.3g} below {:.3g} for {!r}; increase the moment precision".format(gap, min_gap, matrix)
            )
        null = vh[rank:]

    columns = matrix.column_basis
    order = _descending(columns)
    reduced = rref_float(null[:, order])
    polys = []
    for row in reduced:
        coefficients = {}
        for k, value in zip(order, row):
            if abs(value) > PIVOT_THRESHOLD:
                coefficients[columns[k]] = Fraction(float(value)).limit_denominator(MAX_DENOMINATOR)
        polys.append(Polynomial(matrix.n, coefficients))
    return list(reversed(polys)), gap


def harmonic_space(
    norm: NormSpec,
    w: Polynomial,
    degree: int,
    j_list: Sequence[int] | None = None,
    table: MomentTable | None = None,
) -> KernelBasis:
    """
    Strongly harmonic polynomials of degree ≤ D for the ball of norm and the weight w: the kernel of the weighted
    mean value system with the default equation orders.
    """
    assert isinstance(norm, NormSpec)
    assert isinstance(w, Polynomial)
    if w.n != norm.n:
        raise InvalidInput("weight has dimension {} but the norm lives in dimension {}".format(w.n, norm.n))
    if j_list is None:
        j_list = default_j_list(degree, w)
    if table is None:
        table = MomentTable.build(norm, max(j_list))
    return kernel_basis(assemble_general(w, table, j_list, degree))


@dataclass
class ScanReport:
    rows: list[tuple[int, int]]
    stabilized: bool
    laplace_eigenvalue: Fraction | None
    isometry_count: int | None

    @classmethod
    def from_rows(cls, rows: list[tuple[int, int]], norm: NormSpec, w: Polynomial) -> ScanReport:
        dims = [dim for _, dim in rows]
        stabilized = len(dims) >= 3 and dims[-1] == dims[-2] == dims[-3]
        return cls(rows, stabilized, laplace_eigenvalue(w), norm.isometry_count())

    def to_csv(self) -> str:
        return "degree,dimension\n" + "".join("{},{}\n".format(d, dim) for d, dim in self.rows)

    def to_dict(self) -> dict:
        return {
            "rows": [{"degree": d, "dimension": dim} for d, dim in self.rows],
            "stabilized": self.stabilized,
            "laplace_eigenvalue": None if self.laplace_eigenvalue is None else str(self.laplace_eigenvalue),
            "isometry_count": self.isometry_count,
        }


def stabilization_scan(norm: NormSpec, w: Polynomial, degrees: Sequence[int]) -> ScanReport:
    """
    Kernel dimension for each ansatz degree. The scan counts as stabilized when the last three dimensions agree.
    A weight with Δw = λw is flagged, since then the space is infinite dimensional in dimension n > 1.
    """
    degrees = list(degrees)
    if not degrees or any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise InvalidInput("degrees must be a non-empty increasing sequence, got {}".format(degrees))
    table = MomentTable.build(norm, max(default_j_list(degrees[-1], w)))
    rows = []
    for d in degrees:
        basis = harmonic_space(norm, w, d, table=table)
        rows.append((d, basis.dimension))
        log.info("degree %d: dimension %d", d, basis.dimension)
    return ScanReport.from_rows(rows, norm, w)


@dataclass
class BoseReport:
    """
    Kernels of the Bose system (j = 0..l), the iterated Laplace system (l' = 1..l+1) and the general system over
    the Euclidean ball, which coincide when the weighted mean value property of the Euclidean metric is
    characterized by the Bose equations.
    """

    weight: Polynomial
    degree: int
    l: int
    closure_order: int
    bose: KernelBasis
    iterated: KernelBasis
    general: KernelBasis

    @property
    def equivalent(self) -> bool:
        # canonical forms, so equal spans have equal bases
        return self.bose.polynomials == self.iterated.polynomials == self.general.polynomials

    def to_dict(self) -> dict:
        return {
            "weight": str(self.weight),
            "degree": self.degree,
            "l": self.l,
            "closure_order": self.closure_order,
            "equivalent": self.equivalent,
            "bose": self.bose.to_dict(),
            "iterated_laplace": self.iterated.to_dict(),
            "general": self.general.to_dict(),
        }


def bose_equivalence(w: Polynomial, degree: int, l: int | None = None) -> BoseReport:
    """
    :param l: highest j of the Bose system; defaults to one below the Bose closure order of w
    """
    closure = bose_closure_order(w)
    if l is None:
        l = max(closure - 1, 0)
    if l < 0:
        raise InvalidInput("l must be non-negative, got {}".format(l))
    bose = kernel_basis(assemble_bose(w, l, degree))
    iterated = kernel_basis(assemble_iterated_laplace(w, l + 1, degree))
    general = harmonic_space(NormSpec.lp(2, w.n), w, degree)
    report = BoseReport(w, degree, l, closure, bose, iterated, general)
    if not report.equivalent:
        log.warning("kernels differ for w = %s, D = %d: bose %d, iterated %d, general %d", w, degree, bose.dimension, iterated.dimension, general.dimension)
    return report
