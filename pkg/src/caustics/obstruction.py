"""Second-order obstruction for co-preserving the 1/2 and 1/(2l+1) caustics.

With ``M = 2l + 1`` the quadratic system reads, for every ``n != 0``,

    -(i/16) sum_k sum_r P_r(n, k) p_{2Mk + r} p_{2M(n-k) - r} = 0,

``r`` running over ``1..4l+1`` minus ``M``.  Each polynomial ``P_r`` factors as
``-16 i c*^2 (k - c**)(n - k + c**)``, so the ``r``-block of the sum is the
autocorrelation of ``f_k = c* (k - c**) p_{2Mk + r}``.  A nonzero
autocorrelation certifies that the deformation cannot be continued.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .fourier import ZERO_TOL, FourierSeries, ModeSet


class SingularResidueError(ValueError):
    pass


class HypothesisViolation(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("standing hypotheses violated: " + "; ".join(self.violations))


def _modulus(l):
    if l < 1:
        raise ValueError("l must be a positive integer")
    return 2 * l + 1


def _check_residue(l, r):
    M = _modulus(l)
    if r % M == 0:
        raise SingularResidueError(f"r={r} is a multiple of {M}; P_r is singular there")
    return M


def residues(l):
    """``1..4l+1`` without ``2l+1``."""
    M = _modulus(l)
    return [r for r in range(1, 4 * l + 2) if r != M]


def c_const(l, r):
    """``-4 M csc(pi/M) / (e^{2 pi i r/M} - 1)^2``."""
    M = _check_residue(l, r)
    e = cmath.exp(2j * math.pi * r / M)
    return -4 * M / math.sin(math.pi / M) / (e - 1) ** 2


def _factors(l, r):
    M = _check_residue(l, r)
    e = cmath.exp(2j * math.pi * r / M)
    A = (e - 1) * math.cos(math.pi / M)
    B = (1 + e) * math.sin(math.pi / M)
    return c_const(l, r), A, B


def poly_P(l, r, n, k):
    """The displayed product form of ``P^l_r(n, k)``."""
    M = _modulus(l)
    c, A, B = _factors(l, r)
    return c * (A - 1j * B * (2 * M * k + r)) * (B * (2 * M * (n - k) - r) - 1j * A)


def split_constants(l, r):
    """``(c*, c**)`` of the factorisation ``P = -16 i c*^2 (k - c**)(n - k + c**)``."""
    M = _check_residue(l, r)
    x = math.pi * r / M
    radicand = M ** 3 * math.sin(math.pi / M) / math.tan(x) ** 2
    if radicand < 0:
        raise ValueError(f"negative radicand {radicand} for l={l}, r={r}")
    c_star = math.sqrt(radicand)
    c_star_star = (math.tan(x) / math.tan(math.pi / M) - r) / (2 * M)
    return c_star, c_star_star


def split_form(l, r, n, k):
    c_star, c_ss = split_constants(l, r)
    return -16j * c_star ** 2 * (k - c_ss) * (n - k + c_ss)


def block_sums(l, p1: FourierSeries, n_values, use_jit=None):
    """``sum_k P_r(n, k) p_{2Mk+r} p_{2M(n-k)-r}`` for each ``n`` and each residue.

    Returns an array of shape ``(len(n_values), len(residues(l)))``.
    """
    M = _modulus(l)
    rs = residues(l)
    fac = [_factors(l, r) for r in rs]
    cr = np.array([f[0] for f in fac])
    ar = np.array([f[1] for f in fac])
    br = np.array([f[2] for f in fac])
    return kernels.obstruction_sums(p1.coeffs, M, n_values, rs, cr, ar, br, use_jit=use_jit)


def bare_sum(p1: FourierSeries, n):
    """``sum_k k (k - n) p_{6k+1} p_{6(n-k)-1}`` (the ``l = 1`` system without constants)."""
    K = p1.K
    acc = 0j
    for k in range(-(K // 6) - 1, K // 6 + 2):
        a, b = 6 * k + 1, 6 * (n - k) - 1
        if abs(a) <= K and abs(b) <= K:
            acc += k * (k - n) * p1.coeff(a) * p1.coeff(b)
    return acc


def check_hypotheses(l, p1: FourierSeries, tol=ZERO_TOL):
    """Standing hypotheses on ``p1``; maps condition name to whether it holds."""
    M = _modulus(l)
    return {
        "real": bool(p1.real),
        "no_even_modes": p1.project(2).sup_coeff() < tol,
        f"no_modes_in_{M}Z\\0": p1.project(ModeSet(M, (0,), (0,))).sup_coeff() < tol,
        "translation_modes_zero": abs(p1.coeff(1)) < tol and abs(p1.coeff(-1)) < tol,
    }


def _skipped_residue_bound(l, p1, n_values):
    M = _modulus(l)
    K = p1.K
    worst = 0.0
    for n in n_values:
        for k in range(-(K // (2 * M)) - 2, K // (2 * M) + 3):
            a, b = 2 * M * k + M, 2 * M * (n - k) - M
            worst = max(worst, abs(p1.coeff(a) * p1.coeff(b)))
    return worst


def default_n_max(l, K):
    return K // (2 * l + 1) + 2


@dataclass
class ObstructionReport:
    modulus: int
    values: dict
    max_abs: float
    trivial_verdict: bool
    witness_n: int
    tol: float
    n_max: int
    hypotheses: dict = field(default_factory=dict)
    block_values: dict = field(default_factory=dict)
    bare_values: dict | None = None
    n0_value: complex = 0j
    skipped_residue_bound: float = 0.0

    @property
    def l(self):
        return (self.modulus - 1) // 2

    def to_dict(self):
        def rows(d):
            return [[int(n), float(v.real), float(v.imag), float(abs(v))] for n, v in sorted(d.items())]

        out = {
            "modulus": self.modulus,
            "l": self.l,
            "n_max": self.n_max,
            "tol": self.tol,
            "max_abs": self.max_abs,
            "witness_n": self.witness_n,
            "trivial_verdict": self.trivial_verdict,
            "hypotheses": self.hypotheses,
            "values": rows(self.values),
            "n0_value": [float(self.n0_value.real), float(self.n0_value.imag)],
            "skipped_residue_bound": self.skipped_residue_bound,
        }
        if self.bare_values is not None:
            out["bare_values"] = rows(self.bare_values)
        return out

    def csv_rows(self):
        """Rows ``n, re, im, abs, bare_re, bare_im`` (bare columns empty unless ``l = 1``)."""
        out = []
        for n, v in sorted(self.values.items()):
            row = [n, v.real, v.imag, abs(v)]
            if self.bare_values is not None:
                b = self.bare_values[n]
                row += [b.real, b.imag]
            else:
                row += ["", ""]
            out.append(row)
        return out


def quadratic_obstruction(l, p1: FourierSeries, n_max=None, tol=1e-10, strict=True, use_jit=None):
    """Evaluate the second-order system for ``n`` in ``[-n_max, n_max] \\ {0}``.

    ``tol`` is absolute on the sums after dividing by ``||p1||^2``.  With
    ``strict`` the reality and no-even-mode hypotheses, and the absence of
    modes in ``MZ \\ {0}``, must hold; the translation normalisation
    ``p_{+-1} = 0`` is recorded in ``hypotheses`` but not enforced.
    """
    M = _modulus(l)
    hyp = check_hypotheses(l, p1)
    if strict:
        bad = [name for name, ok in hyp.items() if not ok and name != "translation_modes_zero"]
        if bad:
            raise HypothesisViolation(bad)
    if n_max is None:
        n_max = default_n_max(l, p1.K)
    ns = [n for n in range(-n_max, n_max + 1)]
    sums = block_sums(l, p1, ns, use_jit=use_jit)
    rs = residues(l)
    values, blocks = {}, {}
    n0 = 0j
    for i, n in enumerate(ns):
        total = complex(-1j / 16 * np.sum(sums[i]))
        if n == 0:
            n0 = total
            continue
        values[n] = total
        blocks[n] = {r: complex(-1j / 16 * sums[i, j]) for j, r in enumerate(rs)}
    skipped = _skipped_residue_bound(l, p1, ns)
    if strict and skipped >= 1e-14:
        raise HypothesisViolation([f"residue {M} terms do not vanish ({skipped:.3e})"])
    scale = p1.norm() ** 2 or 1.0
    max_abs, witness = 0.0, 0
    for n, v in values.items():
        if abs(v) > max_abs:
            max_abs, witness = abs(v), n
    bare = {n: bare_sum(p1, n) for n in values} if l == 1 else None
    return ObstructionReport(
        modulus=M, values=values, max_abs=max_abs,
        trivial_verdict=max_abs < tol * scale, witness_n=witness, tol=tol, n_max=n_max,
        hypotheses=hyp, block_values=blocks, bare_values=bare, n0_value=n0,
        skipped_residue_bound=skipped)


# -- autocorrelation certificate -------------------------------------------


def auxiliary_series(l, r, p1: FourierSeries):
    """``f_k = c*_{l,r} (k - c**_{l,r}) p_{2Mk + r}`` as a complex series."""
    M = _check_residue(l, r)
    c_star, c_ss = split_constants(l, r)
    Kf = p1.K // (2 * M) + 1
    ks = np.arange(-Kf, Kf + 1)
    coeffs = np.array([c_star * (k - c_ss) * p1.coeff(2 * M * k + r) for k in ks])
    return FourierSeries(coeffs, real=False, rho=p1.rho / (2 * M) if p1.rho else 0.0)


def relevant_modes(l, K):
    """Modes of ``p1`` entering some ``f^(r)`` with nonzero weight."""
    M = _modulus(l)
    out = []
    for r in residues(l):
        _, c_ss = split_constants(l, r)
        for k in range(-(K // (2 * M)) - 1, K // (2 * M) + 2):
            mode = 2 * M * k + r
            if abs(mode) <= K and abs(k - c_ss) > 1e-12:
                out.append(mode)
    return sorted(set(out))


@dataclass
class TrivialityCertificate:
    verdict: str  # "forced-trivial" | "obstructed" | "undetermined"
    witness: tuple | None  # (r, n, value)
    norms: dict
    autocorrelations: dict
    tol: float

    @property
    def forced_trivial(self):
        return self.verdict == "forced-trivial"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else
            {"r": self.witness[0], "n": self.witness[1],
             "value": [self.witness[2].real, self.witness[2].imag]},
            "norms": {str(r): v for r, v in self.norms.items()},
            "tol": self.tol,
        }


def triviality_certificate(l, p1: FourierSeries, tol=1e-10, n_max=None):
    """Autocorrelation diagnostic for each residue class.

    ``forced-trivial``: every auxiliary series vanishes, so the relevant modes
    of ``p1`` are zero.  ``obstructed``: some autocorrelation at ``n != 0`` is
    nonzero, which rules the deformation out.  ``undetermined``: all
    autocorrelations vanish although some auxiliary series does not (e.g. a
    single mode); no conclusion is drawn.
    """
    if n_max is None:
        n_max = default_n_max(l, p1.K)
    scale = p1.norm() or 1.0
    cmax = max(split_constants(l, r)[0] for r in residues(l))
    norms, autos = {}, {}
    witness = None
    best = 0.0
    for r in residues(l):
        f = auxiliary_series(l, r, p1)
        norms[r] = f.norm()
        autos[r] = {n: f.autocorrelation(n) for n in range(1, n_max + 1)}
        for n, v in autos[r].items():
            if abs(v) > best:
                best, witness = abs(v), (r, n, v)
    if all(v < tol * cmax * scale for v in norms.values()):
        verdict = "forced-trivial"
        witness = None
    elif best > tol * (cmax * scale) ** 2:
        verdict = "obstructed"
    else:
        verdict = "undetermined"
        witness = None
    return TrivialityCertificate(verdict, witness, norms, autos, tol)


# -- rigidity sweep -----------------------------------------------------------


def random_admissible(l, K, rng, sparsity=0.0):
    """Random real unit-norm ``p1`` meeting the standing hypotheses.

    Populates odd modes ``3 <= k <= K`` outside ``(2l+1)Z`` with complex
    Gaussians; each mode is dropped with probability ``sparsity``.
    """
    M = _modulus(l)
    modes = {}
    for k in range(3, K + 1, 2):
        if k % M == 0:
            continue
        if sparsity and rng.random() < sparsity:
            continue
        modes[k] = complex(rng.normal(), rng.normal())
    if not modes:
        return FourierSeries.zeros(K)
    p1 = FourierSeries.from_modes(modes, K=K, real=True)
    return p1 / p1.norm()


@dataclass
class SweepResult:
    l: int
    K: int
    samples: int
    seed: int
    failed_triviality: int
    passed_triviality: int
    min_max_abs: float
    counterexamples: list

    def to_dict(self):
        return {
            "l": self.l, "K": self.K, "samples": self.samples, "seed": self.seed,
            "failed_triviality": self.failed_triviality,
            "passed_triviality": self.passed_triviality,
            "min_max_abs": self.min_max_abs,
            "counterexamples": self.counterexamples,
        }


def rigidity_sweep(l, K, samples, seed, tol=1e-10, archive=None, use_jit=None):
    """Check that random admissible ``p1`` never passes the second-order system.

    A sample whose report is trivial while some relevant mode exceeds ``tol``
    is a counterexample; those are collected and, with ``archive``, written
    to that JSON file.
    """
    rng = np.random.default_rng(seed)
    rel = relevant_modes(l, K)
    failed = passed = 0
    min_max = math.inf
    bad = []
    for i in range(samples):
        p1 = random_admissible(l, K, rng)
        rep = quadratic_obstruction(l, p1, tol=tol, use_jit=use_jit)
        min_max = min(min_max, rep.max_abs)
        if rep.trivial_verdict:
            passed += 1
            if max(abs(p1.coeff(k)) for k in rel) >= tol:
                bad.append({"index": i, "p1": p1.to_dict(), "max_abs": rep.max_abs})
        else:
            failed += 1
    result = SweepResult(l, K, samples, seed, failed, passed, min_max, bad)
    if archive is not None and bad:
        Path(archive).write_text(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    return result
