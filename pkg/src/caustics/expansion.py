"""Closed-form epsilon-expansion of ``E^m(1 + eps p1, id + eps u1)``.

The second-order coefficient is a long quadratic form in ``p1``, its first
two derivatives, ``u1`` and their ``+-2pi/m`` shifts.  It is kept as a table
of tagged records (one per displayed summand, grouped summands expanded) and
assembled by exact coefficient algebra.  ``numeric_eps_terms`` provides the
finite-difference oracle every closed form is checked against.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .fourier import ZERO_TOL, FourierSeries, ModeSet
from .obstruction import HypothesisViolation, block_sums
from .variational import _periodic, error_functional_values, grid


class Trig(NamedTuple):
    C1: float
    C2: float
    C3: float
    S1: float
    S2: float
    S3: float

    @classmethod
    def of(cls, m):
        x = math.pi / m
        return cls(math.cos(x), math.cos(2 * x), math.cos(3 * x),
                   math.sin(x), math.sin(2 * x), math.sin(3 * x))


class Term(NamedTuple):
    coef: Callable[[Trig], float]
    factors: tuple
    group: str = ""


# factor names: p, dp, ddp for p1 and its derivatives; u for u1; suffix +/- for shifts
E10_TERMS = (
    Term(lambda c: c.S1 / 2, ("dp+",)),
    Term(lambda c: c.S1 / 2, ("dp-",)),
    Term(lambda c: c.S1, ("dp",)),
    Term(lambda c: c.S1 / 2, ("u+",)),
    Term(lambda c: c.S1 / 2, ("u-",)),
    Term(lambda c: -c.S1, ("u",)),
    Term(lambda c: c.C1 / 2, ("p-",)),
    Term(lambda c: -c.C1 / 2, ("p+",)),
)

# Bracket B of E11 = -csc^2(pi/m)/32 * B, in display order.
E11_TERMS = (
    Term(lambda c: -5 * c.C1, ("p+", "p+")),
    Term(lambda c: c.C3, ("p+", "p+")),
    Term(lambda c: 6 * c.S1, ("u", "p+")),
    Term(lambda c: -2 * c.S3, ("u", "p+")),
    Term(lambda c: -6 * c.S1, ("u+", "p+")),
    Term(lambda c: 2 * c.S3, ("u+", "p+")),
    Term(lambda c: 10 * c.S1, ("dp", "p+")),
    Term(lambda c: 2 * c.S3, ("dp", "p+")),
    Term(lambda c: 6 * c.S1, ("dp+", "p+")),
    Term(lambda c: -2 * c.S3, ("dp+", "p+")),
    Term(lambda c: 4 * c.C1, ("ddp", "p+")),
    Term(lambda c: -4 * c.C3, ("ddp", "p+")),
    Term(lambda c: -(c.C3 - 5 * c.C1), ("p-", "p-")),
    Term(lambda c: -c.C1, ("u+", "u+")),
    Term(lambda c: c.C3, ("u+", "u+")),
    Term(lambda c: c.C1, ("u-", "u-")),
    Term(lambda c: -c.C3, ("u-", "u-")),
    Term(lambda c: c.C1, ("dp+", "dp+")),
    Term(lambda c: -c.C3, ("dp+", "dp+")),
    Term(lambda c: -c.C1, ("dp-", "dp-")),
    Term(lambda c: c.C3, ("dp-", "dp-")),
    Term(lambda c: 2 * c.C1, ("u", "u+")),
    Term(lambda c: -2 * c.C3, ("u", "u+")),
    Term(lambda c: -2 * c.C1, ("u", "u-")),
    Term(lambda c: 2 * c.C3, ("u", "u-")),
    Term(lambda c: -2 * c.C1, ("u+", "dp")),
    Term(lambda c: 2 * c.C3, ("u+", "dp")),
    Term(lambda c: 2 * c.C1, ("u-", "dp")),
    Term(lambda c: -2 * c.C3, ("u-", "dp")),
    Term(lambda c: 2 * c.C1, ("u", "dp+")),
    Term(lambda c: -2 * c.C3, ("u", "dp+")),
    Term(lambda c: 2 * c.C1, ("u+", "dp+")),
    Term(lambda c: -2 * c.C3, ("u+", "dp+")),
    Term(lambda c: -2 * c.C1, ("dp", "dp+")),
    Term(lambda c: 2 * c.C3, ("dp", "dp+")),
    # 2 p (...) group
    Term(lambda c: -2 * (c.C3 - 5 * c.C1), ("p", "p+"), "2p"),
    Term(lambda c: 2 * (c.C3 - 5 * c.C1), ("p", "p-"), "2p"),
    Term(lambda c: -4 * c.S1 * (-4 * c.S1 ** 2), ("p", "u"), "2p"),
    Term(lambda c: -4 * c.S1 * (2 * c.S1 ** 2), ("p", "u-"), "2p"),
    Term(lambda c: -4 * c.S1 * (-c.C2), ("p", "u+"), "2p"),
    Term(lambda c: -4 * c.S1, ("p", "u+"), "2p"),
    Term(lambda c: -4 * c.S1 * (2 * c.C2), ("p", "dp"), "2p"),
    Term(lambda c: -4 * c.S1 * 6, ("p", "dp"), "2p"),
    Term(lambda c: -4 * c.S1 * (-c.C2), ("p", "dp+"), "2p"),
    Term(lambda c: -4 * c.S1, ("p", "dp+"), "2p"),
    Term(lambda c: -4 * c.S1 * (-c.C2), ("p", "dp-"), "2p"),
    Term(lambda c: -4 * c.S1, ("p", "dp-"), "2p"),
    Term(lambda c: -2 * c.C1, ("u", "dp-")),
    Term(lambda c: 2 * c.C3, ("u", "dp-")),
    Term(lambda c: -2 * c.C1, ("u-", "dp-")),
    Term(lambda c: 2 * c.C3, ("u-", "dp-")),
    Term(lambda c: 2 * c.C1, ("dp", "dp-")),
    Term(lambda c: -2 * c.C3, ("dp", "dp-")),
    Term(lambda c: -12 * c.S1, ("u+", "ddp")),
    Term(lambda c: 4 * c.S3, ("u+", "ddp")),
    Term(lambda c: -12 * c.S1, ("u-", "ddp")),
    Term(lambda c: 4 * c.S3, ("u-", "ddp")),
    Term(lambda c: -24 * c.S1, ("dp", "ddp")),
    Term(lambda c: 8 * c.S3, ("dp", "ddp")),
    Term(lambda c: -12 * c.S1, ("dp+", "ddp")),
    Term(lambda c: 4 * c.S3, ("dp+", "ddp")),
    Term(lambda c: -12 * c.S1, ("dp-", "ddp")),
    Term(lambda c: 4 * c.S3, ("dp-", "ddp")),
    # 4 p^- sin(pi/m) (...) group
    Term(lambda c: 4 * c.S1 * (2 * c.S1 ** 2), ("p-", "u"), "4p-"),
    Term(lambda c: 4 * c.S1 * (-2 * c.S1 ** 2), ("p-", "u-"), "4p-"),
    Term(lambda c: 4 * c.S1 * c.C2, ("p-", "dp"), "4p-"),
    Term(lambda c: 4 * c.S1 * 3, ("p-", "dp"), "4p-"),
    Term(lambda c: 4 * c.S1 * (-c.C2), ("p-", "dp-"), "4p-"),
    Term(lambda c: 4 * c.S1, ("p-", "dp-"), "4p-"),
    Term(lambda c: 4 * c.S1 * (-2 * c.S2), ("p-", "ddp"), "4p-"),
    Term(lambda c: -12 * c.S1, ("u+", "ddp+")),
    Term(lambda c: 4 * c.S3, ("u+", "ddp+")),
    Term(lambda c: -12 * c.S1, ("u-", "ddp-")),
    Term(lambda c: 4 * c.S3, ("u-", "ddp-")),
)

E11_SUMMAND_COUNT = 74


def e11_prefactor(m):
    return -1.0 / (32.0 * math.sin(math.pi / m) ** 2)


def _factor_table(m, p1: FourierSeries, u1: FourierSeries, n=1):
    s = 2 * math.pi * n / m
    base = {"p": p1, "dp": p1.derivative(1), "ddp": p1.derivative(2), "u": u1}
    table = {}
    for name, series in base.items():
        table[name] = series
        table[name + "+"] = series.shift(s)
        table[name + "-"] = series.shift(-s)
    return table


def _assemble(terms, m, p1, u1, prefactor=1.0):
    c = Trig.of(m)
    table = _factor_table(m, p1, _periodic(u1))
    grouped = defaultdict(float)
    for term in terms:
        grouped[term.factors] += term.coef(c)
    K = 2 * max(p1.K, _periodic(u1).K)
    out = FourierSeries.zeros(K)
    for factors, weight in grouped.items():
        if weight == 0.0:
            continue
        piece = table[factors[0]]
        for name in factors[1:]:
            piece = piece * table[name]
        out = out + piece.resize(K) * (prefactor * weight)
    return out


def expansion_term_E10(m, p1: FourierSeries, u1) -> FourierSeries:
    """First-order coefficient ``E^m_{1,0}``."""
    return _assemble(E10_TERMS, m, p1, u1).resize(max(p1.K, _periodic(u1).K))


def recurrence_tilde(m, p_next: FourierSeries, u_next) -> FourierSeries:
    """``E~^m_{N+1,0}``: the linear form carried by ``(p_{N+1}, u_{N+1})``.

    It has the same shape as the first-order term; the higher orders of the
    deformation only enter at ``eps^{N+2}``.
    """
    return expansion_term_E10(m, p_next, u_next)


def linear_coefficients(m):
    """``(sin(pi/m)/2, cos(pi/m)/2)``, e.g. ``(sqrt(3)/4, 1/4)`` for ``m = 3``."""
    return math.sin(math.pi / m) / 2, math.cos(math.pi / m) / 2


def expansion_term_E11(m, p1: FourierSeries, u1) -> FourierSeries:
    """Second-order coefficient ``E^m_{1,1}`` (the ``eps^2`` Taylor coefficient)."""
    return _assemble(E11_TERMS, m, p1, u1, e11_prefactor(m))


def e11_projection(l, p1: FourierSeries, tol=ZERO_TOL, use_jit=None) -> FourierSeries:
    """Modes ``2(2l+1) n`` of ``E^{2l+1}_{1,1}`` from the polynomial double sum.

    Requires ``F_{(2l+1)Z \\ {0}}(p1) = 0`` with ``u1`` given by the first-order
    solve.  The coefficient of ``e^{2i(2l+1)nt}`` is
    ``(n/2) sum_k sum_r P_r(n, k) p_{2Mk+r} p_{2M(n-k)-r}``.
    """
    M = 2 * l + 1
    bad = p1.project(ModeSet(M, (0,), (0,)))
    if bad.sup_coeff() >= tol:
        raise HypothesisViolation([f"p1 has modes in {M}Z\\0: {[k for k in bad.support(tol) if k > 0]}"])
    period = 2 * M
    K_out = 2 * p1.K
    n_max = K_out // period
    ns = list(range(-n_max, n_max + 1))
    sums = block_sums(l, p1, ns, use_jit=use_jit).sum(axis=1)
    c = np.zeros(2 * K_out + 1, dtype=complex)
    for n, s in zip(ns, sums):
        c[period * n + K_out] = 0.5 * n * s
    return FourierSeries(c, real=p1.real)


# -- numerical oracle -------------------------------------------------------


def _stencil(f, h):
    fm2, fm1, f0, f1, f2 = (f(j * h) for j in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * f1 - f2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * f1 - f2) / (12 * h * h)
    return d1, d2


def numeric_eps_terms(m, p1: FourierSeries, u1, N=None, steps=(1e-3, 1e-4)):
    """First and second Taylor coefficients in ``eps`` of ``E^m(1 + eps p1, id + eps u1)``.

    Five-point central stencils at the two ``steps`` combined by Richardson
    extrapolation (their error is ``O(h^4)``).  Returns grid values
    ``(t, first, second)`` where ``second`` is half the second derivative.
    """
    u1 = _periodic(u1)
    N = N or max(4 * max(p1.K, u1.K) + 1, 65)
    t = grid(N)
    one = FourierSeries.constant(1.0)

    def E(eps):
        return error_functional_values(m, one + p1 * eps, u1 * eps, t, check=False)

    h1, h2 = steps
    a1, a2 = _stencil(E, h1)
    b1, b2 = _stencil(E, h2)
    q = (h1 / h2) ** 4
    d1 = b1 + (b1 - a1) / (q - 1)
    d2 = b2 + (b2 - a2) / (q - 1)
    return t, d1, 0.5 * d2


@dataclass
class ExpansionReport:
    order: int
    analytic_term: FourierSeries
    numeric_term: FourierSeries
    discrepancy: float

    def to_dict(self):
        return {
            "order": self.order,
            "discrepancy": self.discrepancy,
            "analytic_term": self.analytic_term.to_dict(tol=1e-300),
            "numeric_term": self.numeric_term.to_dict(tol=1e-300),
        }


def expansion_reports(m, p1: FourierSeries, u1, N=None):
    """Analytic ``E_{1,0}``, ``E_{1,1}`` against the finite-difference oracle."""
    u1 = _periodic(u1)
    t, d1, d2 = numeric_eps_terms(m, p1, u1, N)
    out = []
    for order, analytic, numeric in ((1, expansion_term_E10(m, p1, u1), d1),
                                     (2, expansion_term_E11(m, p1, u1), d2)):
        disc = float(np.max(np.abs(analytic.evaluate(t) - numeric)))
        out.append(ExpansionReport(order, analytic,
                                   FourierSeries.from_samples(numeric, real=True), disc))
    return out
