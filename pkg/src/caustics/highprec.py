"""Multiprecision evaluation of ``E^m`` for order-of-accuracy fits.

Remainders like ``eps^4`` at ``eps = 1e-4`` sit below double precision, so the
recurrence check evaluates the functional with mpmath instead.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np

from .expansion import recurrence_tilde
from .fourier import FourierSeries
from .geometry import Deformation


def _jet(coeffs, K, x):
    # value, first and second derivative of a real series at x
    v = d1 = d2 = mpmath.mpf(0)
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        k = i - K
        z = c * mpmath.expj(k * x)
        v += z.real
        d1 += (1j * k * z).real
        d2 += (-(k * k) * z).real
    return v, d1, d2


def _partials(a, b, d):
    p, pd, pdd = a
    q, qd, qdd = b
    cs, sn = mpmath.cos(d), mpmath.sin(d)
    S = mpmath.sqrt(p * p + pd * pd + q * q + qd * qd
                    - 2 * (p * q + pd * qd) * cs - 2 * (p * qd - pd * q) * sn)
    d1 = (p + pdd) * (pd - qd * cs + q * sn) / S
    d2 = (q + qdd) * (qd - pd * cs - p * sn) / S
    return d1, d2


def _functional(m, pc, K, uc, Ku, t):
    shift = 2 * mpmath.pi / m
    out = []
    for tj in t:
        tj = mpmath.mpf(tj)
        pts = [tj - shift, tj, tj + shift]
        us = [x + _jet(uc, Ku, x)[0] for x in pts]
        jets = [_jet(pc, K, x) for x in us]
        d1, _ = _partials(jets[1], jets[2], us[1] - us[2])
        _, d2 = _partials(jets[0], jets[1], us[0] - us[1])
        out.append(d1 + d2)
    return out


def error_functional_mp(m, p: FourierSeries, u: FourierSeries, t, dps=40):
    """``E^m(p, id + u)`` at the points ``t`` with ``dps`` decimal digits."""
    with mpmath.workdps(dps):
        pc = [mpmath.mpc(complex(c)) for c in p.coeffs]
        uc = [mpmath.mpc(complex(c)) for c in u.coeffs]
        return _functional(m, pc, p.K, uc, u.K, t)


def recurrence_remainders(m, deformation: Deformation, N, eps_values, t=None, dps=40):
    """``sup_t |E(P_{N+1}, U_{N+1}) - E(P_N, U_N) - eps^{N+1} E~_{N+1,0}|`` per ``eps``."""
    if deformation.N < N + 1:
        raise ValueError(f"deformation needs at least {N + 1} orders")
    if t is None:
        t = 2 * math.pi * np.arange(16) / 16 + 0.1
    tilde = recurrence_tilde(m, deformation.p_orders[N], deformation.u_orders[N])
    tilde_vals = tilde.evaluate(np.asarray(t))
    out = []
    with mpmath.workdps(dps):
        for eps in eps_values:
            e = mpmath.mpf(eps)
            hi = _eval_truncated(m, deformation, N + 1, e, t, dps)
            lo = _eval_truncated(m, deformation, N, e, t, dps)
            rem = [abs(h - l_ - e ** (N + 1) * mpmath.mpf(float(tv)))
                   for h, l_, tv in zip(hi, lo, tilde_vals)]
            out.append(float(max(rem)))
    return np.array(out)


def _eval_truncated(m, deformation, N, eps, t, dps):
    # P_N and U_N assembled with multiprecision eps
    K = max(max(pn.K for pn in deformation.p_orders[:N]), 0)
    Ku = max((un.K for un in deformation.u_orders[:N]), default=0)
    with mpmath.workdps(dps):
        pc = [mpmath.mpc(0)] * (2 * K + 1)
        pc[K] = mpmath.mpc(1)
        uc = [mpmath.mpc(0)] * (2 * Ku + 1)
        for n, (pn, un) in enumerate(zip(deformation.p_orders[:N], deformation.u_orders[:N]), start=1):
            w = eps ** n
            for i, c in enumerate(pn.resize(K).coeffs):
                pc[i] += w * mpmath.mpc(complex(c))
            for i, c in enumerate(un.resize(Ku).coeffs):
                uc[i] += w * mpmath.mpc(complex(c))
        return _functional(m, pc, K, uc, Ku, t)


def loglog_slope(eps_values, remainders):
    """Least-squares slope of ``log(remainder)`` against ``log(eps)``."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.asarray(remainders, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
