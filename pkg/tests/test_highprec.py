import numpy as np
import pytest

from caustics.fourier import FourierSeries
from caustics.geometry import Deformation
from caustics.highprec import error_functional_mp, loglog_slope, recurrence_remainders
from caustics.variational import error_functional_values
from conftest import random_real


def test_mp_matches_double_precision(wobbly, rng):
    u = random_real(rng, 3, scale=0.05)
    t = [0.2, 1.9, 4.4]
    mp_vals = [float(v) for v in error_functional_mp(3, wobbly.series, u, t)]
    assert np.allclose(mp_vals, error_functional_values(3, wobbly, u, t), atol=1e-13)


def test_loglog_slope_exact_power():
    eps = np.array([1e-1, 1e-2, 1e-3])
    assert loglog_slope(eps, 3 * eps ** 2.5) == pytest.approx(2.5)


def test_recurrence_remainder_order(rng):
    K = 3
    p = tuple(random_real(rng, K, scale=0.3) for _ in range(2))
    u = tuple(random_real(rng, K, scale=0.3) for _ in range(2))
    d = Deformation(p, u)
    eps = [1e-2, 1e-3, 1e-4]
    rem = recurrence_remainders(2, d, 1, eps, dps=30)
    assert loglog_slope(eps, rem) > 2.8
    with pytest.raises(ValueError):
        recurrence_remainders(2, d, 2, eps)
