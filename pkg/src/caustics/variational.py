"""The Levi--Moser error functional and its first-order cohomological solve.

``E^m(p, u)(t) = d1 S_p(u(t), u(t + 2 pi n/m)) + d2 S_p(u(t - 2 pi n/m), u(t))``
vanishes identically exactly when ``u`` parametrises an ``n/m`` caustic.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .fourier import ZERO_TOL, FourierSeries, ModeSet
from .geometry import DegenerateChordError, SupportFunction, _check_chord, _series

log = logging.getLogger(__name__)

MIN_CHORD = 1e-6


class MonotonicityError(ValueError):
    """``u`` is not an increasing circle map."""


def default_grid(K_p, K_u=0):
    N = 4 * max(K_p, K_u, 1) + 1
    return max(N, 65)


def grid(N):
    return 2 * math.pi * np.arange(N) / N


@dataclass(frozen=True, eq=False)
class CausticCandidate:
    """Circle map ``u(t) = t + periodic_part(t)`` with rotation ``n/m``."""

    periodic_part: FourierSeries
    rotation: Fraction = Fraction(1, 3)
    check: bool = True

    def __post_init__(self):
        if not self.periodic_part.real:
            raise ValueError("periodic part of u must be real-flagged")
        object.__setattr__(self, "rotation", Fraction(self.rotation))
        if self.check:
            margin = self.monotonicity_margin()
            if margin <= 0:
                raise MonotonicityError(f"u is not monotone: min of u' is {margin:.3e}")

    @classmethod
    def identity(cls, m, n=1, K=0):
        return cls(FourierSeries.zeros(K), Fraction(n, m))

    @property
    def m(self):
        return self.rotation.denominator

    @property
    def n(self):
        return self.rotation.numerator

    def monotonicity_margin(self):
        N = max(4 * self.periodic_part.K + 1, 256)
        return float(1 + np.min(self.periodic_part.evaluate(grid(N), 1)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return t + self.periodic_part.evaluate(t)

    def to_dict(self):
        return {"rotation": [self.n, self.m], "periodic_part": self.periodic_part.to_dict()}

    @classmethod
    def from_dict(cls, data):
        n, m = data["rotation"]
        return cls(FourierSeries.from_dict(data["periodic_part"]), Fraction(int(n), int(m)))


def _periodic(u):
    if isinstance(u, CausticCandidate):
        return u.periodic_part
    if u is None:
        return FourierSeries.zeros(0)
    return u


def error_functional_values(m, p, u, t, n=1, check=True):
    """Pointwise values of ``E^m(p, u)`` at the parameters ``t``.

    ``p`` is a support function (or a real series) and ``u`` the periodic
    part of the circle map (series or :class:`CausticCandidate`).
    """
    series = _series(p)
    up = _periodic(u)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    shift = 2 * math.pi * n / m
    tt = np.concatenate([t - shift, t, t + shift])
    ut = tt + up.evaluate(tt) if up.K or abs(up.coeff(0)) else tt.copy()
    um, u0, upl = np.split(ut, 3)
    if check:
        _check_chord(u0, upl)
        _check_chord(um, u0)
    jet = series.jet(ut, 2)
    jm, j0, jp = np.split(jet, 3, axis=1)
    # forward chord (u, u+) and backward chord (u-, u)
    S_f, d1, _ = kernels.chord_partials(j0[0], j0[1], j0[2], jp[0], jp[1], jp[2], u0 - upl)
    S_b, _, d2 = kernels.chord_partials(jm[0], jm[1], jm[2], j0[0], j0[1], j0[2], um - u0)
    if check:
        smin = min(float(np.min(S_f)), float(np.min(S_b)))
        if not smin > MIN_CHORD:
            raise DegenerateChordError(f"chord length {smin:.3e} below {MIN_CHORD}")
    return d1 + d2


def error_functional(m, p, u=None, N=None, n=1, check=True):
    """Fourier series of ``E^m(p, u)`` from ``N`` (odd) equispaced samples."""
    if m < 2:
        raise ValueError("m must be at least 2")
    series = _series(p)
    up = _periodic(u)
    if check and isinstance(u, FourierSeries):
        CausticCandidate(up, Fraction(n, m))  # monotonicity
    N = N or default_grid(series.K, up.K)
    values = error_functional_values(m, series, up, grid(N), n=n, check=check)
    log.debug("E^%d grid sup norm %.3e on %d points", m, np.max(np.abs(values)), N)
    return FourierSeries.from_samples(values, real=True)


def error_sup_norm(m, p, u=None, N=None, n=1):
    series = _series(p)
    up = _periodic(u)
    N = N or default_grid(series.K, up.K)
    return float(np.max(np.abs(error_functional_values(m, series, up, grid(N), n=n))))


# -- first order ------------------------------------------------------------


def a_coeff(m, k):
    """``i (k cot^2(pi k/m) - cot(pi/m) cot(pi k/m))`` for ``k`` not in ``mZ``."""
    if k % m == 0:
        raise ValueError(f"a_(m,k) undefined for k={k} in {m}Z")
    ck = 1.0 / math.tan(math.pi * k / m)
    return 1j * (k * ck * ck - ck / math.tan(math.pi / m))


class FirstOrderObstruction(Exception):
    """``p_1`` has modes in ``mZ \\ {0}``; no first-order ``u_1`` exists."""

    def __init__(self, m, projection: FourierSeries):
        self.m = m
        self.projection = projection
        modes = [k for k in projection.support(ZERO_TOL) if k > 0]
        super().__init__(f"F_(mZ\\0)(p1) != 0 for m={m}: modes {modes}")

    @property
    def modes(self):
        return [k for k in self.projection.support(ZERO_TOL) if k > 0]


def solve_first_order(m, p1: FourierSeries, tol=ZERO_TOL):
    """``u_1`` with ``E^m_{1,0}(p_1, u_1) = 0``.

    Free modes ``k`` in ``mZ`` are set to zero.  Raises
    :class:`FirstOrderObstruction` carrying ``F_{mZ\\0}(p_1)`` otherwise.
    """
    if not p1.real:
        raise ValueError("p1 must be real-flagged")
    obstruction = p1.project(ModeSet(m, (0,), (0,)))
    if obstruction.sup_coeff() >= tol:
        raise FirstOrderObstruction(m, obstruction)
    c = np.zeros_like(p1.coeffs)
    for i, k in enumerate(p1.modes):
        if k % m:
            c[i] = a_coeff(m, int(k)) * p1.coeffs[i]
    return CausticCandidate(FourierSeries(c, real=True), Fraction(1, m), check=False)
