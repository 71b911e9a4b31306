"""Billiard map iteration, used as an oracle independent of the variational code.

Orbits are kept on the real line (lifted parameters), so a period-``m``
orbit with winding ``n`` advances by exactly ``2 pi n`` over one period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .geometry import TWO_PI, DegenerateChordError, _series, boundary_point, chord_data

EDGE = 1e-6


class BracketError(RuntimeError):
    """The reflection equation did not change sign on the search interval."""


@dataclass(frozen=True)
class ChordState:
    t: float
    t_next: float

    def __post_init__(self):
        gap = abs(math.remainder(self.t - self.t_next, TWO_PI))
        if gap < 1e-9:
            raise DegenerateChordError("chord endpoints coincide")


@dataclass(frozen=True)
class Orbit:
    points: tuple
    period: int
    rotation_index: int = 1

    def lifted(self):
        return np.asarray(self.points, dtype=float)

    def wrapped(self):
        return np.mod(self.lifted(), TWO_PI)


def _d2(p, t, tp):
    return chord_data(p, t, tp, check=False)[2][0]


def _d1(p, t, tp):
    return chord_data(p, t, tp, check=False)[1][0]


def next_point(p, t, t_prime, tol=1e-13):
    """Third parameter ``t''`` in ``(t', t' + 2 pi)`` continuing the chord ``(t, t')``.

    Solves ``d2 S(t, t') + d1 S(t', t'') = 0``: bisection down to 1e-6, then
    Newton polishing with a centred difference slope.
    """
    series = _series(p)
    incoming = _d2(series, t, t_prime)

    def g(x):
        return incoming + _d1(series, t_prime, x)

    lo, hi = t_prime + EDGE, t_prime + TWO_PI - EDGE
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise BracketError(
            f"no sign change for reflection at t'={t_prime:.6g} (g={glo:.3e}, {ghi:.3e}); "
            "check convexity margin and truncation")
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    h = 1e-6
    for _ in range(20):
        gx = g(x)
        slope = (g(x + h) - g(x - h)) / (2 * h)
        step = gx / slope
        x -= step
        if abs(step) < tol:
            break
    return x


def reflect_next_point(p, t, t_prime):
    """Vector reflection law: mirror the incoming direction about the normal at ``t'``.

    Kept free of generating-function derivatives so it can check
    :func:`next_point`.
    """
    series = _series(p)
    X0 = np.array(boundary_point(series, t))
    X1 = np.array(boundary_point(series, t_prime))
    d = X1 - X0
    d /= np.linalg.norm(d)
    n = np.array([math.cos(t_prime), math.sin(t_prime)])
    r = d - 2 * np.dot(d, n) * n

    def h(x):
        X = np.array(boundary_point(series, x))
        w = X - X1
        return r[0] * w[1] - r[1] * w[0]

    return brentq(h, t_prime + EDGE, t_prime + TWO_PI - EDGE, xtol=1e-15, rtol=1e-15, maxiter=200)


def iterate(p, seed: ChordState, iterations):
    """Lifted parameters ``t_0, t_1, ..., t_{iterations+1}``."""
    pts = [seed.t, seed.t_next]
    # lift the seed so that t_1 lies in (t_0, t_0 + 2 pi)
    pts[1] = pts[0] + math.fmod(pts[1] - pts[0], TWO_PI) % TWO_PI
    for _ in range(iterations):
        pts.append(next_point(p, pts[-2], pts[-1]))
    return np.array(pts)


def reflection_residual(p, orbit: Orbit, per_point=False):
    """``max_j |d2 S(t_{j-1}, t_j) + d1 S(t_j, t_{j+1})|`` with cyclic indexing."""
    t = orbit.lifted()
    if t.size < 2:
        raise ValueError("orbit needs at least two points")
    prev = np.roll(t, 1)
    nxt = np.roll(t, -1)
    series = _series(p)
    _, _, d2 = chord_data(series, prev, t)
    _, d1, _ = chord_data(series, t, nxt)
    res = np.abs(d2 + d1)
    return res if per_point else float(np.max(res))


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    rational: Fraction
    error: float
    iterations: int

    @property
    def locked(self):
        return self.error < 1.0 / self.iterations


def rotation_number(p, seed: ChordState, iterations=1000, max_denominator=None):
    """Mean lifted advance per bounce over ``2 pi``.

    The rational report is the continued-fraction convergent with the
    smallest denominator inside the ``1/iterations`` resolution window.
    """
    if iterations < 100:
        raise ValueError("need at least 100 iterations")
    pts = iterate(p, seed, iterations)
    value = (pts[-1] - pts[1]) / (TWO_PI * iterations)
    if max_denominator is None:
        max_denominator = max(1, int(math.isqrt(iterations)))
    window = 1.0 / iterations
    frac = Fraction(value).limit_denominator(1)
    for q in range(1, max_denominator + 1):
        cand = Fraction(value).limit_denominator(q)
        frac = cand
        if abs(float(cand) - value) < window:
            break
    return RotationEstimate(float(value), frac, abs(float(frac) - value), iterations)
