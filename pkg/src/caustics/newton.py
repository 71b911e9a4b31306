"""Newton iteration for exact rational caustics.

Unknowns are the cosine/sine coefficients of the periodic part of ``u``
(modes ``1..K_u``; the mean is pinned to zero).  The residual is ``E^m`` on
an equispaced grid and the Jacobian is built column by column with central
differences.  Reparametrisations commuting with the ``2 pi/m`` rotation keep
``E^m = 0``, so the Jacobian is rank deficient near a solution; steps are
minimum-norm least-squares solutions.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fourier import FourierSeries
from .geometry import DegenerateChordError, _series
from .variational import (MIN_CHORD, CausticCandidate, MonotonicityError,
                          error_functional_values, grid)

log = logging.getLogger(__name__)


class NewtonFailure(RuntimeError):
    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


def _pack(series: FourierSeries, K):
    s = series.resize(K)
    c = s.coeffs[K + 1:]
    return np.concatenate([2 * c.real, -2 * c.imag])


def _unpack(x, K):
    a, b = x[:K], x[K:]
    pos = 0.5 * (a - 1j * b)
    c = np.concatenate([np.conj(pos[::-1]), [0.0], pos])
    return FourierSeries(c, real=True)


@dataclass
class NewtonResult:
    candidate: CausticCandidate
    residual: float
    iterations: int
    history: list = field(default_factory=list)


def newton_solve_caustic(p, m, u_init=None, tol=1e-11, K_u=None, N=None, n=1,
                         max_iter=50, fd_step=1e-7, rcond=1e-12):
    """Solve ``E^m(p, u) = 0`` for ``u = id + periodic part``.

    Returns a :class:`NewtonResult` whose grid sup-norm residual is below
    ``tol``; raises :class:`NewtonFailure` after ``max_iter`` iterations and
    :class:`MonotonicityError` if an iterate stops being a circle
    homeomorphism.
    """
    series = _series(p)
    if u_init is None:
        u_init = CausticCandidate.identity(m, n)
    # u is an infinite series even for polynomial p; 32 modes resolve it to
    # ~1e-12 on the near-circular tables this solver targets
    K_u = K_u or max(series.K, u_init.periodic_part.K, 32)
    N = N or 4 * K_u + 1
    t = grid(N)
    x = _pack(u_init.periodic_part, K_u)

    def residual(vec):
        return error_functional_values(m, series, _unpack(vec, K_u), t, n=n)

    F = residual(x)
    norm = float(np.max(np.abs(F)))
    history = [norm]
    it = 0
    while norm >= tol:
        if it >= max_iter:
            raise NewtonFailure(f"no convergence after {max_iter} iterations (residual {norm:.3e})", history)
        it += 1
        J = np.empty((N, x.size))
        for j in range(x.size):
            e = np.zeros_like(x)
            e[j] = fd_step
            J[:, j] = (residual(x + e) - residual(x - e)) / (2 * fd_step)
        step = np.linalg.lstsq(J, -F, rcond=rcond)[0]
        lam = 1.0
        for _ in range(9):
            trial = x + lam * step
            cand = CausticCandidate(_unpack(trial, K_u), Fraction(n, m), check=False)
            if cand.monotonicity_margin() > 0:
                try:
                    Ft = residual(trial)
                except DegenerateChordError:
                    Ft = None
                if Ft is not None and np.max(np.abs(Ft)) < norm:
                    break
            lam *= 0.5
        else:
            cand = CausticCandidate(_unpack(x + step, K_u), Fraction(n, m), check=False)
            if cand.monotonicity_margin() <= 0:
                raise MonotonicityError("Newton step destroys monotonicity of u")
            raise NewtonFailure(f"residual stalled at {norm:.3e}", history)
        x, F = trial, Ft
        norm = float(np.max(np.abs(F)))
        history.append(norm)
        log.debug("newton it %d residual %.3e damping %.3g", it, norm, lam)
    cand = CausticCandidate(_unpack(x, K_u), Fraction(n, m))
    return NewtonResult(cand, norm, it, history)


def caustic_orbits(candidate: CausticCandidate, base_points):
    """Lifted ``m``-point orbits ``u(t + 2 pi j n/m)`` for each base point."""
    m, n = candidate.m, candidate.n
    base = np.asarray(base_points, dtype=float)
    shifts = 2 * math.pi * n * np.arange(m) / m
    return candidate(base[:, None] + shifts[None, :])
