"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled by numba (see ``_jit``)
and a vectorised numpy version.  The public wrappers at the bottom pick the
loop version when JIT is enabled and the numpy one otherwise, so the two
paths can be compared directly (``benchmarks/bench_kernels.py``) and tested
for parity.

Dense coefficient arrays always store mode ``k`` at index ``k + K``.
"""
import numpy as np

from ._jit import jit_enabled, maybe_njit


# ---------------------------------------------------------------------------
# loop versions (numba targets)
# ---------------------------------------------------------------------------

def _convolve_loop(a, b):
    na = a.shape[0]
    nb = b.shape[0]
    out = np.zeros(na + nb - 1, dtype=np.complex128)
    for i in range(na):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(nb):
            out[i + j] += ai * b[j]
    return out


def _autocorr_loop(c, n):
    # sum_k c_k conj(c_{k-n}) over the dense window
    size = c.shape[0]
    acc = 0.0 + 0.0j
    for i in range(size):
        j = i - n
        if 0 <= j < size:
            acc += c[i] * np.conj(c[j])
    return acc


def _synth_loop(c, x, order):
    # returns real(sum_k (ik)^d c_k e^{ikx}) for d = 0..order
    size = c.shape[0]
    K = (size - 1) // 2
    npts = x.shape[0]
    out = np.zeros((order + 1, npts), dtype=np.float64)
    for j in range(npts):
        w = np.exp(1j * x[j])
        winv = np.conj(w)
        # start at e^{-iKx} and walk upwards
        z = 1.0 + 0.0j
        for _ in range(K):
            z *= winv
        for i in range(size):
            k = i - K
            term = c[i] * z
            fac = 1.0 + 0.0j
            for d in range(order + 1):
                out[d, j] += (fac * term).real
                fac *= 1j * k
            z *= w
    return out


def _chord_loop(p, pd, pdd, q, qd, qdd, d):
    n = p.shape[0]
    S = np.empty(n)
    d1 = np.empty(n)
    d2 = np.empty(n)
    for j in range(n):
        cs = np.cos(d[j])
        sn = np.sin(d[j])
        s2 = (p[j] * p[j] + pd[j] * pd[j] + q[j] * q[j] + qd[j] * qd[j]
              - 2.0 * (p[j] * q[j] + pd[j] * qd[j]) * cs
              - 2.0 * (p[j] * qd[j] - pd[j] * q[j]) * sn)
        s = np.sqrt(s2)
        S[j] = s
        d1[j] = (p[j] + pdd[j]) * (pd[j] - qd[j] * cs + q[j] * sn) / s
        d2[j] = (q[j] + qdd[j]) * (qd[j] - pd[j] * cs - p[j] * sn) / s
    return S, d1, d2


def _obstruction_loop(coeffs, modulus, n_values, residues, cr, ar, br):
    # sum_k sum_r c_r (A_r - i B_r (2Mk + r)) (B_r (2M(n-k) - r) - i A_r) p_{2Mk+r} p_{2M(n-k)-r}
    size = coeffs.shape[0]
    K = (size - 1) // 2
    period = 2 * modulus
    nn = n_values.shape[0]
    nr = residues.shape[0]
    out = np.zeros((nn, nr), dtype=np.complex128)
    kmin = -(K // period) - 2
    kmax = K // period + 2
    for a in range(nn):
        n = n_values[a]
        for b in range(nr):
            r = residues[b]
            acc = 0.0 + 0.0j
            for k in range(kmin, kmax + 1):
                i1 = period * k + r
                i2 = period * (n - k) - r
                if i1 < -K or i1 > K or i2 < -K or i2 > K:
                    continue
                v1 = coeffs[i1 + K]
                v2 = coeffs[i2 + K]
                if v1 == 0 or v2 == 0:
                    continue
                f1 = ar[b] - 1j * br[b] * (period * k + r)
                f2 = br[b] * (period * (n - k) - r) - 1j * ar[b]
                acc += cr[b] * f1 * f2 * v1 * v2
            out[a, b] = acc
    return out


# ---------------------------------------------------------------------------
# numpy versions
# ---------------------------------------------------------------------------

def _convolve_numpy(a, b):
    return np.convolve(a, b)


def _autocorr_numpy(c, n):
    size = c.shape[0]
    if abs(n) >= size:
        return 0.0 + 0.0j
    if n >= 0:
        return complex(np.dot(c[n:], np.conj(c[:size - n])))
    return complex(np.dot(c[:size + n], np.conj(c[-n:])))


def _synth_numpy(c, x, order):
    K = (c.shape[0] - 1) // 2
    k = np.arange(-K, K + 1)
    basis = np.exp(1j * np.outer(x, k))
    out = np.empty((order + 1, x.shape[0]))
    for d in range(order + 1):
        out[d] = (basis @ (c * (1j * k) ** d)).real
    return out


def _chord_numpy(p, pd, pdd, q, qd, qdd, d):
    cs = np.cos(d)
    sn = np.sin(d)
    s2 = (p * p + pd * pd + q * q + qd * qd
          - 2.0 * (p * q + pd * qd) * cs
          - 2.0 * (p * qd - pd * q) * sn)
    S = np.sqrt(s2)
    d1 = (p + pdd) * (pd - qd * cs + q * sn) / S
    d2 = (q + qdd) * (qd - pd * cs - p * sn) / S
    return S, d1, d2


def _obstruction_numpy(coeffs, modulus, n_values, residues, cr, ar, br):
    K = (coeffs.shape[0] - 1) // 2
    period = 2 * modulus
    ks = np.arange(-(K // period) - 2, K // period + 3)
    out = np.zeros((n_values.shape[0], residues.shape[0]), dtype=np.complex128)
    for b, r in enumerate(residues):
        i1 = period * ks + r
        ok1 = np.abs(i1) <= K
        v1 = np.where(ok1, coeffs[np.clip(i1, -K, K) + K], 0.0)
        f1 = ar[b] - 1j * br[b] * i1
        for a, n in enumerate(n_values):
            i2 = period * (n - ks) - r
            ok2 = np.abs(i2) <= K
            v2 = np.where(ok2, coeffs[np.clip(i2, -K, K) + K], 0.0)
            f2 = br[b] * i2 - 1j * ar[b]
            out[a, b] = cr[b] * np.sum(f1 * f2 * v1 * v2)
    return out


_convolve_jit = maybe_njit(_convolve_loop)
_autocorr_jit = maybe_njit(_autocorr_loop)
_synth_jit = maybe_njit(_synth_loop)
_chord_jit = maybe_njit(_chord_loop)
_obstruction_jit = maybe_njit(_obstruction_loop)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _as_c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def _as_f(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def convolve(a, b, use_jit=None):
    """Exact linear convolution of two dense coefficient arrays."""
    fn = _convolve_jit if _pick(use_jit) else _convolve_numpy
    return fn(_as_c(a), _as_c(b))


def autocorrelation(c, n, use_jit=None):
    fn = _autocorr_jit if _pick(use_jit) else _autocorr_numpy
    return complex(fn(_as_c(c), int(n)))


def synthesize(c, x, order=0, use_jit=None):
    """Real parts of the series and its first ``order`` derivatives at ``x``.

    Returns an array of shape ``(order + 1, len(x))``.
    """
    x = np.atleast_1d(_as_f(x))
    fn = _synth_jit if _pick(use_jit) else _synth_numpy
    return fn(_as_c(c), x, int(order))


def chord_partials(p, pd, pdd, q, qd, qdd, d, use_jit=None):
    """Chord length and both partials of the generating function.

    ``p, pd, pdd`` are the support function and its derivatives at the first
    parameter, ``q, qd, qdd`` at the second one, and ``d`` is the parameter
    difference ``t - t'``.
    """
    args = [np.atleast_1d(_as_f(v)) for v in (p, pd, pdd, q, qd, qdd, d)]
    args = np.broadcast_arrays(*args)
    args = [np.ascontiguousarray(a) for a in args]
    fn = _chord_jit if _pick(use_jit) else _chord_numpy
    return fn(*args)


def obstruction_sums(coeffs, modulus, n_values, residues, cr, ar, br, use_jit=None):
    fn = _obstruction_jit if _pick(use_jit) else _obstruction_numpy
    return fn(_as_c(coeffs), int(modulus), np.asarray(n_values, dtype=np.int64),
              np.asarray(residues, dtype=np.int64), _as_c(cr), _as_c(ar), _as_c(br))


def _pick(use_jit):
    if use_jit is None:
        return jit_enabled()
    return bool(use_jit) and jit_enabled()
