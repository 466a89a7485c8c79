class MeanHarmonicException(Exception):
    """
    base class for Exceptions from this library
    """


class InvalidInput(MeanHarmonicException):
    """
    base class for rejected input; corresponds to exit code 2 of the command line interface
    """


class DimensionMismatch(InvalidInput):
    """
    operands live in spaces of different dimension
    """


class InvalidNorm(InvalidInput):
    """
    the unit ball description does not define a norm (asymmetric, degenerate or unbounded body, p < 1)
    """


class InvalidPolynomial(InvalidInput):
    """
    polynomial text could not be parsed or is not a polynomial with rational coefficients
    """


class InsufficientMomentOrder(InvalidInput):
    """
    a moment table was asked for moments above its maximal order
    """


class InadmissibleProbe(InvalidInput):
    """
    the closure of a probed ball is not contained in the domain box
    """


class DegenerateBody(InvalidInput):
    """
    rejection sampling accepted too few points
    """


class WeightNotPositive(InvalidInput):
    """
    the weight is not positive on a probed ball, so it does not define a measure there
    """


class NumericalError(MeanHarmonicException):
    """
    base class for failures of floating point decisions
    """


class AmbiguousRank(NumericalError):
    """
    the singular value gap is too small to decide the rank; corresponds to exit code 3
    """


class EllipticityFailure(NumericalError):
    """
    the order 2 symbol of a moment table is not positive definite
    """


class CacheOutdated(Exception):
    pass
