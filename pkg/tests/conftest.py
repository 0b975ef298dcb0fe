import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def series_iv(nu, z, terms=50):
    """Ascending series for I_nu(z) and I'_nu(z), used as an independent oracle."""
    import mpmath as mp

    with mp.workdps(40):
        zz = mp.mpf(z)
        val = mp.mpf(0)
        dval = mp.mpf(0)
        for k in range(terms):
            c = (zz / 2) ** (2 * k + nu) / (mp.factorial(k) * mp.gamma(k + nu + 1))
            val += c
            dval += c * (2 * k + nu) / zz
        return float(val), float(dval)


def kv_half_closed(ell, z):
    """Closed form K_{ell+1/2}(z) = sqrt(pi/2z) e^-z sum_j (ell+j)!/(j!(ell-j)!(2z)^j)."""
    import math

    acc = 0.0
    for j in range(ell + 1):
        acc += (
            math.factorial(ell + j)
            / (math.factorial(j) * math.factorial(ell - j) * (2.0 * z) ** j)
        )
    return math.sqrt(math.pi / (2.0 * z)) * math.exp(-z) * acc
