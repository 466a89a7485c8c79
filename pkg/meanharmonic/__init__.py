# -*- coding: utf-8 -*-

"""
Mean Harmonic
~~~~~~~~~~~~~

Strongly harmonic polynomials of norm-induced metrics with polynomial weights.

:copyright: (c) 2022-present VAWVAW
:license: GPL3, see LICENSE for more details.

"""

__title__ = "meanharmonic"
__author__ = "VAWVAW"
__license__ = "GPL3"
__copyright__ = "Copyright 2022-present VAWVAW"

__path__ = __import__("pkgutil").extend_path(__path__, __name__)

from collections import namedtuple
import logging

VersionInfo = namedtuple("VersionInfo", "major minor micro releaselevel serial")

version_info = VersionInfo(major=0, minor=1, micro=0, releaselevel="development", serial=0)
__version__ = "0.1.0"

from .errors import (
    MeanHarmonicException,
    InvalidInput,
    DimensionMismatch,
    InvalidNorm,
    InvalidPolynomial,
    InsufficientMomentOrder,
    InadmissibleProbe,
    DegenerateBody,
    WeightNotPositive,
    NumericalError,
    AmbiguousRank,
    EllipticityFailure,
)
from .polycore import MultiIndex, Polynomial, derivative, laplacian_iter, grad_dot, evaluate
from .scalar import Scalar
from .norms import NormSpec, Simplex, gauge, contains, triangulate
from .moments import (
    MomentTable,
    lp_moment,
    polytope_moment,
    mc_moment,
    coefficient_A,
    f_ratio,
    f_ratio_derivative,
    f_ratio_scan,
    ellipticity_certificate,
)
from .pde import (
    PdeSystemMatrix,
    assemble_general,
    assemble_fl,
    assemble_bose,
    assemble_iterated_laplace,
    bose_closure_order,
    laplace_eigenvalue,
)
from .kernel import KernelBasis, kernel_basis, harmonic_space, stabilization_scan, bose_equivalence
from .meanvalue import (
    VerificationReport,
    pizzetti_mean,
    weighted_mean,
    mc_mean,
    exact_polytope_mean,
    verify_strongly_harmonic,
    iterated_weight_check,
    random_probes,
)
from .config import RunConfig
from .cache import Cache
from .abc import Cacheable
from .workbench import Workbench

logging.getLogger(__name__).addHandler(logging.NullHandler())
