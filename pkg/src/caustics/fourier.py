"""Truncated Fourier series on the circle.

A :class:`FourierSeries` stores the modes ``-K..K`` densely.  All operations
act on the coefficients exactly (no resampling), so products widen the
truncation order and shifts/derivatives are diagonal.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

import numpy as np

from . import kernels

ZERO_TOL = 1e-10


@dataclass(frozen=True)
class ModeSet:
    """Integers ``k`` with ``k % period`` in ``residues``, minus ``exclude``.

    ``ModeSet(n)`` is ``nZ``; ``ModeSet(n, exclude=(0,))`` is ``nZ \\ {0}``.
    """

    period: int
    residues: tuple = (0,)
    exclude: tuple = ()

    def __contains__(self, k):
        return (k % self.period) in self.residues and k not in self.exclude


def multiples(n, nonzero=False):
    return ModeSet(abs(int(n)), (0,), (0,) if nonzero else ())


Modes = Union[int, ModeSet, Callable[[int], bool], Iterable[int]]


def _mode_predicate(modes: Modes):
    if isinstance(modes, (int, np.integer)):
        return multiples(int(modes)).__contains__
    if isinstance(modes, ModeSet):
        return modes.__contains__
    if callable(modes):
        return modes
    allowed = frozenset(int(k) for k in modes)
    return allowed.__contains__


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """Complex coefficients of ``sum_k c_k e^{ikt}`` for ``|k| <= K``.

    ``real`` marks Hermitian series (``c_{-k} = conj(c_k)``); such series
    evaluate to real numbers.  ``rho`` is an analyticity-width estimate kept
    as metadata only (0 means unknown).
    """

    coeffs: np.ndarray
    real: bool = False
    rho: float = 0.0
    _K: int = field(init=False, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.size % 2 != 1:
            raise ValueError("dense coefficient array must have odd length 2K+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "_K", (c.size - 1) // 2)
        if self.rho < 0:
            raise ValueError("rho must be non-negative")
        if self.real:
            mismatch = np.max(np.abs(c - np.conj(c[::-1]))) if c.size else 0.0
            scale = max(1.0, float(np.max(np.abs(c))))
            if mismatch > 1e-12 * scale:
                raise ValueError(f"series flagged real is not Hermitian (mismatch {mismatch:.3e})")

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, K, real=True):
        return cls(np.zeros(2 * K + 1), real=real)

    @classmethod
    def constant(cls, value, K=0):
        c = np.zeros(2 * K + 1, dtype=complex)
        c[K] = value
        return cls(c, real=np.isreal(value))

    @classmethod
    def from_modes(cls, modes: dict, K=None, real=None, rho=0.0):
        """Build from ``{k: c_k}``; missing modes are zero.

        With ``real=True`` only one of each ``+-k`` pair needs to be given;
        the partner is filled with the conjugate.
        """
        kmax = max((abs(int(k)) for k in modes), default=0)
        K = kmax if K is None else K
        if kmax > K:
            raise ValueError(f"mode {kmax} exceeds truncation K={K}")
        c = np.zeros(2 * K + 1, dtype=complex)
        for k, v in modes.items():
            c[int(k) + K] = v
        if real:
            for k, v in modes.items():
                k = int(k)
                if -k not in modes:
                    c[-k + K] = np.conj(v)
            c[K] = c[K].real
        if real is None:
            real = bool(np.allclose(c, np.conj(c[::-1]), rtol=0, atol=1e-14))
        return cls(c, real=real, rho=rho)

    @classmethod
    def cos(cls, k, amplitude=1.0, K=None):
        k = abs(int(k))
        if k == 0:
            return cls.constant(float(amplitude), K or 0)
        return cls.from_modes({k: amplitude / 2, -k: amplitude / 2}, K=K, real=True)

    @classmethod
    def sin(cls, k, amplitude=1.0, K=None):
        k = abs(int(k))
        if k == 0:
            return cls.zeros(K or 0)
        return cls.from_modes({k: -0.5j * amplitude, -k: 0.5j * amplitude}, K=K, real=True)

    @classmethod
    def from_samples(cls, values, K=None, real=None):
        """Coefficients from values on the grid ``2 pi j / N``.

        Exact for trigonometric polynomials of degree ``< N/2``.  Modes above
        ``K`` (default ``(N-1)//2``) are dropped.
        """
        values = np.asarray(values)
        N = values.shape[0]
        if real is None:
            real = not np.iscomplexobj(values)
        Kmax = (N - 1) // 2
        K = Kmax if K is None else min(K, Kmax)
        F = np.fft.fft(values) / N
        idx = np.arange(-K, K + 1) % N
        c = F[idx]
        if real:
            c = 0.5 * (c + np.conj(c[::-1]))
        return cls(c, real=real)

    # -- basic accessors ----------------------------------------------------

    @property
    def K(self):
        return self._K

    @property
    def modes(self):
        return np.arange(-self._K, self._K + 1)

    def coeff(self, k):
        k = int(k)
        if abs(k) > self._K:
            return 0j
        return complex(self.coeffs[k + self._K])

    def __getitem__(self, k):
        return self.coeff(k)

    def support(self, tol=0.0):
        """Modes whose coefficient exceeds ``tol`` in modulus."""
        return [int(k) for k in self.modes[np.abs(self.coeffs) > tol]]

    def norm(self):
        """l2 norm of the coefficients (the L2 mean norm of the function)."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def sup_coeff(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def is_zero(self, tol=ZERO_TOL):
        return self.sup_coeff() < tol

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, t, derivative=0):
        t_arr = np.asarray(t, dtype=float)
        x = np.atleast_1d(t_arr).ravel()
        if self.real:
            vals = kernels.synthesize(self.coeffs, x, derivative)[derivative]
        else:
            k = self.modes
            vals = np.exp(1j * np.outer(x, k)) @ (self.coeffs * (1j * k) ** derivative)
        vals = vals.reshape(t_arr.shape)
        return vals[()] if vals.ndim == 0 else vals

    __call__ = evaluate

    def jet(self, t, order=2):
        """Values and derivatives up to ``order`` at real points ``t``.

        Real series only; returns an array of shape ``(order + 1, len(t))``.
        """
        if not self.real:
            raise ValueError("jet() is defined for real series only")
        return kernels.synthesize(self.coeffs, t, order)

    def samples(self, N):
        t = 2 * np.pi * np.arange(N) / N
        return self.evaluate(t)

    # -- coefficient algebra -----------------------------------------------

    def _like(self, coeffs, real=None):
        return FourierSeries(coeffs, real=self.real if real is None else real, rho=self.rho)

    def resize(self, K):
        """Zero-pad or truncate to order ``K``."""
        if K == self._K:
            return self
        c = np.zeros(2 * K + 1, dtype=complex)
        m = min(K, self._K)
        c[K - m:K + m + 1] = self.coeffs[self._K - m:self._K + m + 1]
        return self._like(c)

    def derivative(self, order=1):
        if order == 0:
            return self
        k = self.modes
        return self._like(self.coeffs * (1j * k) ** order)

    def shift(self, s):
        """The series of ``t -> f(t + s)``."""
        return self._like(self.coeffs * np.exp(1j * self.modes * s))

    def shift_difference(self, shift=2 * np.pi / 3):
        """``t -> f(t) - f(t - shift)``."""
        return self._like(self.coeffs * (1 - np.exp(-1j * self.modes * shift)))

    def project(self, modes: Modes):
        keep = _mode_predicate(modes)
        mask = np.array([bool(keep(int(k))) for k in self.modes], dtype=bool)
        symmetric = bool(np.all(mask == mask[::-1]))
        return self._like(np.where(mask, self.coeffs, 0), real=self.real and symmetric)

    def conj(self):
        """Series of the complex conjugate function."""
        return self._like(np.conj(self.coeffs[::-1]))

    def product(self, other):
        if not isinstance(other, FourierSeries):
            return self.scale(other)
        c = kernels.convolve(self.coeffs, other.coeffs)
        return FourierSeries(c, real=self.real and other.real,
                             rho=min(self.rho, other.rho))

    def scale(self, factor):
        real = self.real and np.isreal(factor)
        return FourierSeries(self.coeffs * factor, real=bool(real), rho=self.rho)

    def _binary(self, other, sign):
        if not isinstance(other, FourierSeries):
            other = FourierSeries.constant(other)
        K = max(self._K, other._K)
        a = self.resize(K).coeffs
        b = other.resize(K).coeffs
        return FourierSeries(a + sign * b, real=self.real and other.real,
                             rho=min(self.rho, other.rho))

    def __add__(self, other):
        return self._binary(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, -1)

    def __rsub__(self, other):
        return (-self)._binary(other, 1)

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, other):
        return self.product(other)

    def __rmul__(self, other):
        return self.product(other)

    def __truediv__(self, factor):
        return self.scale(1.0 / factor)

    # -- analytic diagnostics -------------------------------------------------

    def autocorrelation(self, n):
        """``sum_k c_k conj(c_{k-n})`` over the truncation window."""
        return kernels.autocorrelation(self.coeffs, n)

    def strip_norm_bound(self, rho_prime):
        """``sum_k |c_k| e^{rho' |k|}``: bounds ``sup |f|`` on ``|Im z| < rho'``."""
        if rho_prime < 0:
            raise ValueError("strip half-width must be non-negative")
        return float(np.sum(np.abs(self.coeffs) * np.exp(rho_prime * np.abs(self.modes))))

    def decay_bound_holds(self, strip_norm=None):
        """Check ``|c_k| <= ||f||_rho e^{-rho |k|}`` with the recorded ``rho``."""
        if self.rho <= 0:
            return True
        bound = self.strip_norm_bound(self.rho) if strip_norm is None else strip_norm
        lhs = np.abs(self.coeffs)
        rhs = bound * np.exp(-self.rho * np.abs(self.modes))
        return bool(np.all(lhs <= rhs * (1 + 1e-12)))

    def allclose(self, other, atol=ZERO_TOL):
        return (self - other).sup_coeff() < atol

    # -- serialisation ------------------------------------------------------

    def to_dict(self, tol=0.0):
        rows = []
        for k, c in zip(self.modes, self.coeffs):
            if abs(c) > tol:
                rows.append([int(k), float(c.real), float(c.imag)])
        return {"K": self._K, "real": bool(self.real), "rho": float(self.rho), "coeffs": rows}

    @classmethod
    def from_dict(cls, data):
        try:
            K = int(data["K"])
            rows = data.get("coeffs", [])
            real = bool(data.get("real", False))
            rho = float(data.get("rho", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed Fourier series object: {exc}") from exc
        if K < 0:
            raise ValueError("K must be non-negative")
        c = np.zeros(2 * K + 1, dtype=complex)
        for i, row in enumerate(rows):
            if len(row) != 3:
                raise ValueError(f"coeffs[{i}] must be [k, re, im], got {row!r}")
            k = int(row[0])
            if abs(k) > K:
                raise ValueError(f"coeffs[{i}]: mode {k} outside [-{K}, {K}]")
            c[k + K] = complex(float(row[1]), float(row[2]))
        return cls(c, real=real, rho=rho)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        nz = self.support(1e-15)
        return f"FourierSeries(K={self._K}, real={self.real}, nonzero_modes={nz[:12]}{'...' if len(nz) > 12 else ''})"


# spec-level function names -----------------------------------------------


def evaluate(f: FourierSeries, t):
    return f.evaluate(t)


def derivative(f: FourierSeries, order=1):
    return f.derivative(order)


def project(f: FourierSeries, modes: Modes):
    return f.project(modes)


def shift_difference(f: FourierSeries, shift=2 * math.pi / 3):
    return f.shift_difference(shift)


def product(f: FourierSeries, g: FourierSeries):
    return f.product(g)


def autocorrelation(f: FourierSeries, n):
    return f.autocorrelation(n)


def strip_norm_bound(f: FourierSeries, rho_prime):
    return f.strip_norm_bound(rho_prime)
