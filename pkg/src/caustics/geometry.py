"""Convex domains described by their support function.

The boundary point with outward normal angle ``t`` is
``p(t) (cos t, sin t) + p'(t) (-sin t, cos t)`` and the billiard generating
function is the chord length between two such points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .fourier import ZERO_TOL, FourierSeries, ModeSet

DEGENERATE_CHORD = 1e-9
TWO_PI = 2 * math.pi


class DegenerateChordError(ValueError):
    """Raised when two chord endpoints coincide (mod 2 pi)."""


class ConvexityError(ValueError):
    pass


def convexity_grid_size(K):
    return max(4 * K + 1, 512)


def _margin_on_grid(series, N):
    t = TWO_PI * np.arange(N) / N
    jet = series.jet(t, 2)
    return float(np.min(jet[0])), float(np.min(jet[0] + jet[2]))


def certify_convexity(series: FourierSeries, max_doublings=6):
    """Minimum of ``p`` and of ``p + p''`` on a refined grid.

    The grid starts at ``max(4K+1, 512)`` points and is doubled until the
    curvature-radius margin changes by less than 1%.
    """
    N = convexity_grid_size(series.K)
    pmin, margin = _margin_on_grid(series, N)
    for _ in range(max_doublings):
        N *= 2
        pmin2, margin2 = _margin_on_grid(series, N)
        stable = abs(margin2 - margin) <= 0.01 * max(abs(margin2), 1e-300)
        pmin, margin = min(pmin, pmin2), min(margin, margin2)
        if stable:
            break
    return pmin, margin


@dataclass(frozen=True, eq=False)
class SupportFunction:
    """A real trigonometric polynomial that is a valid strictly convex support function."""

    series: FourierSeries
    convexity_margin: float = field(init=False)
    min_value: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.series, FourierSeries):
            object.__setattr__(self, "series", FourierSeries(np.asarray(self.series), real=True))
        if not self.series.real:
            raise ValueError("support function must be a real-flagged series")
        pmin, margin = certify_convexity(self.series)
        object.__setattr__(self, "min_value", pmin)
        object.__setattr__(self, "convexity_margin", margin)
        if pmin <= 0:
            raise ConvexityError(f"support function not positive (min {pmin:.3e}); origin outside domain")
        if margin <= 0:
            raise ConvexityError(f"domain not strictly convex: min of p + p'' is {margin:.3e}")

    @classmethod
    def disc(cls, radius=1.0):
        return cls(FourierSeries.constant(float(radius)))

    @classmethod
    def from_modes(cls, modes, K=None):
        return cls(FourierSeries.from_modes(modes, K=K, real=True))

    @property
    def K(self):
        return self.series.K

    def __call__(self, t, derivative=0):
        return self.series.evaluate(t, derivative)

    def jet(self, t, order=2):
        return self.series.jet(np.atleast_1d(np.asarray(t, dtype=float)), order)

    def to_dict(self):
        return {"support": self.series.to_dict()}

    @classmethod
    def from_dict(cls, data):
        if "support" not in data:
            raise ValueError("domain spec needs a 'support' key")
        return cls(FourierSeries.from_dict(data["support"]))


def ellipse_support(a=1.0, b=0.95, K=32):
    """Truncated series of ``sqrt(a^2 cos^2 t + b^2 sin^2 t)``."""
    N = 8 * K + 8
    t = TWO_PI * np.arange(N) / N
    values = np.sqrt((a * np.cos(t)) ** 2 + (b * np.sin(t)) ** 2)
    return SupportFunction(FourierSeries.from_samples(values, K=K, real=True))


def _series(p):
    return p.series if isinstance(p, SupportFunction) else p


def boundary_point(p, t):
    """Cartesian boundary point(s) with outward normal angle ``t``."""
    series = _series(p)
    t = np.asarray(t, dtype=float)
    jet = series.jet(np.atleast_1d(t).ravel(), 1)
    tt = np.atleast_1d(t).ravel()
    x = jet[0] * np.cos(tt) - jet[1] * np.sin(tt)
    y = jet[0] * np.sin(tt) + jet[1] * np.cos(tt)
    if t.ndim == 0:
        return float(x[0]), float(y[0])
    return x.reshape(t.shape), y.reshape(t.shape)


def radius_of_curvature(p, t):
    series = _series(p)
    return series.evaluate(t) + series.evaluate(t, 2)


def constant_width_check(p, tol=ZERO_TOL):
    """Constant width test and average width.

    Constant width means no nonzero even harmonic; the average width is
    twice the mean of ``p``.  Returns ``(is_constant_width, omega)``.
    """
    series = _series(p)
    even = series.project(ModeSet(2, (0,), (0,)))
    omega = 2.0 * series.coeff(0).real
    return even.sup_coeff() < tol, omega


def even_modes(p, tol=ZERO_TOL):
    """Nonzero even modes ``k > 0`` that break constant width."""
    series = _series(p)
    return [k for k in series.support(tol) if k > 0 and k % 2 == 0]


def _check_chord(t, tp):
    gap = np.abs(np.mod(np.asarray(t) - np.asarray(tp) + math.pi, TWO_PI) - math.pi)
    if np.any(gap < DEGENERATE_CHORD):
        raise DegenerateChordError("chord endpoints coincide (mod 2 pi)")


def chord_data(p, t, tp, check=True):
    """Chord length and both partials at ``(t, t')``, vectorised."""
    series = _series(p)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tp = np.atleast_1d(np.asarray(tp, dtype=float))
    t, tp = np.broadcast_arrays(t, tp)
    if check:
        _check_chord(t, tp)
    a = series.jet(t.ravel(), 2)
    b = series.jet(tp.ravel(), 2)
    S, d1, d2 = kernels.chord_partials(a[0], a[1], a[2], b[0], b[1], b[2], (t - tp).ravel())
    return S.reshape(t.shape), d1.reshape(t.shape), d2.reshape(t.shape)


def generating_function(p, t, t_prime):
    t_arr = np.asarray(t, dtype=float)
    S, _, _ = chord_data(p, t, t_prime)
    return float(S.ravel()[0]) if t_arr.ndim == 0 and np.ndim(t_prime) == 0 else S


def partial_S(p, t, t_prime, which):
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    _, d1, d2 = chord_data(p, t, t_prime)
    out = d1 if which == 1 else d2
    return float(out.ravel()[0]) if np.ndim(t) == 0 and np.ndim(t_prime) == 0 else out


@dataclass(frozen=True, eq=False)
class Deformation:
    """Perturbation orders ``p_1..p_N`` of the unit disc with companion ``u_n``.

    ``P_N(eps) = 1 + sum eps^n p_n`` and ``U_N(eps) = id + sum eps^n u_n``.
    """

    p_orders: tuple
    u_orders: tuple = ()
    epsilon_max: float = 0.0

    def __post_init__(self):
        p = tuple(self.p_orders)
        u = tuple(self.u_orders) or tuple(FourierSeries.zeros(0) for _ in p)
        if len(u) != len(p):
            raise ValueError("need one u_n for every p_n")
        for n, pn in enumerate(p, start=1):
            if not pn.real:
                raise ValueError(f"p_{n} must be real-flagged")
            if abs(pn.coeff(0)) > ZERO_TOL:
                raise ValueError(f"p_{n} violates the normalization F_0(p_n) = 0")
        object.__setattr__(self, "p_orders", p)
        object.__setattr__(self, "u_orders", u)
        if self.epsilon_max == 0.0:
            object.__setattr__(self, "epsilon_max", self.validity_radius())

    @property
    def N(self):
        return len(self.p_orders)

    def P(self, eps, N=None):
        N = self.N if N is None else N
        out = FourierSeries.constant(1.0)
        for n, pn in enumerate(self.p_orders[:N], start=1):
            out = out + pn * eps ** n
        return out

    def U(self, eps, N=None):
        """Periodic part of ``U_N(eps)``."""
        N = self.N if N is None else N
        out = FourierSeries.zeros(0)
        for n, un in enumerate(self.u_orders[:N], start=1):
            out = out + un * eps ** n
        return out

    def validity_radius(self):
        """Largest ``eps`` (bisection, capped at 1) keeping ``P_N`` strictly convex."""
        def ok(eps):
            s = self.P(eps)
            pmin, margin = _margin_on_grid(s, convexity_grid_size(s.K))
            return pmin > 0 and margin > 0

        if ok(1.0):
            return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
        return lo
