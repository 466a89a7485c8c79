from fractions import Fraction

import numpy as np
import pytest

from meanharmonic.polycore import Polynomial, indices_up_to


@pytest.fixture
def random_polynomial():
    """
    factory for seeded random polynomials with small rational coefficients
    """

    def make(n: int, degree: int, seed: int, density: float = 0.6) -> Polynomial:
        rng = np.random.default_rng(seed)
        terms = {}
        for alpha in indices_up_to(n, degree):
            if rng.random() < density:
                terms[alpha] = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        return Polynomial(n, terms)

    return make
