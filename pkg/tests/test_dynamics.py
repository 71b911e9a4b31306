import math
from fractions import Fraction

import numpy as np
import pytest

from caustics.dynamics import (BracketError, ChordState, Orbit, iterate, next_point,
                               reflect_next_point, reflection_residual, rotation_number)
from caustics.geometry import DegenerateChordError, SupportFunction


def test_next_point_agrees_with_reflection_law(wobbly):
    for t, tp in ((0.0, 2.0), (1.0, 1.6), (4.0, 7.5)):
        assert next_point(wobbly, t, tp) == pytest.approx(reflect_next_point(wobbly, t, tp), abs=1e-10)


def test_disc_orbits_rotate_rigidly():
    p = SupportFunction.disc()
    pts = iterate(p, ChordState(0.3, 0.3 + 0.9), 20)
    assert np.allclose(np.diff(pts), 0.9, atol=1e-12)


def test_periodic_orbit_closes_on_disc():
    p = SupportFunction.disc(2.0)
    pts = iterate(p, ChordState(0.0, 2 * math.pi / 5), 5)
    assert pts[5] == pytest.approx(2 * math.pi, abs=1e-12)
    assert reflection_residual(p, Orbit(tuple(pts[:5]), 5)) < 1e-13


def test_rotation_number_disc_and_ellipse(ellipse):
    est = rotation_number(SupportFunction.disc(), ChordState(0.0, 2 * math.pi / 3), 100)
    assert est.rational == Fraction(1, 3) and est.locked
    est = rotation_number(ellipse, ChordState(0.0, math.pi), 120)
    # the major axis is a 2-periodic orbit
    assert est.rational == Fraction(1, 2)
    with pytest.raises(ValueError):
        rotation_number(ellipse, ChordState(0.0, 1.0), 10)


def test_residual_on_non_orbit_is_large(ellipse):
    assert reflection_residual(ellipse, Orbit((0.0, 2.0, 4.3), 3)) > 1e-3


def test_degenerate_seed():
    with pytest.raises(DegenerateChordError):
        ChordState(1.0, 1.0)


def test_bracket_error_on_non_convex_series():
    from caustics.fourier import FourierSeries
    bad = FourierSeries.from_modes({0: 1.0, 3: 0.2}, K=3, real=True)  # not convex
    with pytest.raises(BracketError):
        for t in np.linspace(0.05, 6, 40):
            next_point(bad, t, t + 0.05)


def test_orbit_wrapping():
    o = Orbit((1.0, 7.0, 13.0), 3)
    assert np.allclose(o.wrapped(), np.mod([1.0, 7.0, 13.0], 2 * math.pi))
