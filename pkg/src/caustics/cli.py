"""Command line front end.

Subcommands: verify, expand, solve-caustic, obstruct, orbit, width-check.
Exit status is 0 when every requested check passes, 1 when a check fails
and 2 on malformed input.  Reports carry ``"schema": 1`` and the resolved
configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import ChordState, Orbit, iterate, reflection_residual, rotation_number
from .expansion import expansion_reports
from .fourier import FourierSeries
from .geometry import (ConvexityError, SupportFunction, boundary_point,
                       constant_width_check, even_modes)
from .newton import NewtonFailure, caustic_orbits, newton_solve_caustic
from .obstruction import (HypothesisViolation, quadratic_obstruction, random_admissible,
                          rigidity_sweep, triviality_certificate)
from .variational import (CausticCandidate, FirstOrderObstruction, MonotonicityError,
                          error_sup_norm, solve_first_order)

SCHEMA = 1
COMMANDS = ("verify", "expand", "solve-caustic", "obstruct", "orbit", "width-check")

DEFAULT_TOLS = {
    "verify": {"residual": 1e-12, "newton": 1e-10},
    "expand": {"e10": 1e-6, "e11": 1e-5},
    "solve-caustic": {"newton": 1e-10, "reflection": 1e-8},
    "obstruct": {"verdict": 1e-10},
    "orbit": {"residual": 1e-10},
    "width-check": {"width": 1e-10},
}

CSV_HELP = """\
CSV columns:
  orbit        j,t_j,x_j,y_j,residual_j   (residual empty at the two ends)
  obstruct     n,re,im,abs,bare_re,bare_im (bare columns only for --l 1)
  other        key,value                   (flattened scalar summary)
"""


class InputError(Exception):
    """Malformed input; reported with exit status 2."""


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    output: str | None = None
    format: str = "json"
    tolerances: dict = field(default_factory=dict)
    K: int | None = None
    m: list | None = None
    l: int = 1
    n_max: int | None = None
    iterations: int | None = None
    seed: int = 0
    base_points: int = 64
    t0: float = 0.0

    def validate(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        for name, val in self.tolerances.items():
            if not val > 0:
                raise InputError(f"tolerance {name} must be positive, got {val}")
        if self.K is not None and self.K < 1:
            raise InputError("--K must be at least 1")
        if self.m is not None and any(m < 2 for m in self.m):
            raise InputError("--m values must be at least 2")
        if self.l < 1:
            raise InputError("--l must be at least 1 (modulus 2l+1 >= 3)")
        if self.format not in ("json", "csv"):
            raise InputError("--format must be json or csv")
        return self


# -- input helpers ------------------------------------------------------------


def _line_of(text, token):
    for i, line in enumerate(text.splitlines(), start=1):
        if token in line:
            return i
    return 1


def _load_json(path):
    p = Path(path)
    if not p.exists():
        raise InputError(f"{path}: no such file")
    text = p.read_text()
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _series_from(data, text, path, key=None):
    obj = data if key is None else data.get(key)
    try:
        return FourierSeries.from_dict(obj)
    except (ValueError, TypeError, AttributeError) as exc:
        line = _line_of(text, f'"{key}"' if key else '"coeffs"')
        raise InputError(f"{path}:{line}: {exc}") from exc


def load_domain(path):
    data, text = _load_json(path)
    if not isinstance(data, dict) or "support" not in data:
        raise InputError(f"{path}:1: domain spec must be an object with a 'support' key")
    series = _series_from(data, text, path, "support")
    if not series.real:
        raise InputError(f"{path}:{_line_of(text, 'real')}: support series must be real")
    try:
        return SupportFunction(series)
    except ConvexityError as exc:
        raise InputError(f"{path}:{_line_of(text, 'support')}: {exc}") from exc


def load_perturbation(path):
    """``p1`` (and optionally ``u1``) from a bare series or ``{"p1": ..., "u1": ...}``."""
    data, text = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}:1: expected a JSON object")
    if "p1" in data:
        p1 = _series_from(data, text, path, "p1")
        u1 = _series_from(data, text, path, "u1") if "u1" in data else None
    else:
        p1, u1 = _series_from(data, text, path), None
    if not p1.real:
        raise InputError(f"{path}:{_line_of(text, 'real')}: p1 must be real")
    return p1, u1


# -- output helpers -------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return _clean(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append([prefix, json.dumps(obj) if isinstance(obj, list) else obj])


def render(report, fmt, rows=None, header=None):
    if fmt == "json":
        return json.dumps(_clean(report), indent=2, sort_keys=True, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows is not None:
        writer.writerow(header)
        writer.writerows(["" if (isinstance(v, float) and not math.isfinite(v)) else v for v in row]
                         for row in rows)
    else:
        flat = []
        _flatten("", _clean(report), flat)
        writer.writerow(["key", "value"])
        writer.writerows(flat)
    return buf.getvalue()


# -- commands -------------------------------------------------------------------


def _tol(cfg, name):
    return cfg.tolerances[name]


def cmd_verify(cfg):
    p = load_domain(cfg.input_path)
    ms = cfg.m or list(range(2, 8))
    per_m = []
    ok_all = True
    for m in ms:
        res = error_sup_norm(m, p)
        entry = {"m": m, "identity_residual": res, "newton": None}
        ok = res < _tol(cfg, "residual")
        if not ok:
            try:
                sol = newton_solve_caustic(p, m, tol=_tol(cfg, "newton"), K_u=cfg.K)
                entry["newton"] = {"converged": True, "residual": sol.residual,
                                   "iterations": sol.iterations}
                ok = True
            except (NewtonFailure, MonotonicityError) as exc:
                entry["newton"] = {"converged": False, "error": str(exc)}
        entry["passed"] = ok
        ok_all &= ok
        per_m.append(entry)
    is_cw, omega = constant_width_check(p)
    report = {"domain": {"convexity_margin": p.convexity_margin, "min_support": p.min_value,
                         "constant_width": is_cw, "average_width": omega},
              "caustics": per_m}
    return ok_all, report, None, None


def cmd_width_check(cfg):
    p = load_domain(cfg.input_path)
    tol = _tol(cfg, "width")
    is_cw, omega = constant_width_check(p, tol)
    bad = even_modes(p, tol)
    report = {"constant_width": is_cw, "average_width": omega, "offending_modes": bad,
              "offending_amplitudes": {str(k): abs(p.series.coeff(k)) for k in bad}}
    return is_cw, report, None, None


def cmd_expand(cfg):
    m = (cfg.m or [3])[0]
    if cfg.input_path:
        p1, u1 = load_perturbation(cfg.input_path)
        source = "input"
    else:
        rng = np.random.default_rng(cfg.seed)
        K = cfg.K or 8
        p1 = random_series(K, rng)
        u1 = random_series(K, rng)
        source = "random"
    first_order = None
    if u1 is None:
        try:
            u1 = solve_first_order(m, p1).periodic_part
            first_order = {"status": "solved"}
        except FirstOrderObstruction as exc:
            u1 = FourierSeries.zeros(p1.K)
            first_order = {"status": "obstructed", "modes": exc.modes}
    reps = expansion_reports(m, p1, u1)
    passed = reps[0].discrepancy < _tol(cfg, "e10") and reps[1].discrepancy < _tol(cfg, "e11")
    report = {"m": m, "source": source, "first_order": first_order,
              "p1": p1.to_dict(), "u1": u1.to_dict(),
              "reports": [r.to_dict() for r in reps]}
    return passed, report, None, None


def random_series(K, rng, scale=0.5):
    """Real series with mean zero and coefficients decaying like ``(1+k)^-2``."""
    modes = {k: scale * complex(rng.normal(), rng.normal()) / (1 + k) ** 2 for k in range(1, K + 1)}
    return FourierSeries.from_modes(modes, K=K, real=True)


def cmd_solve_caustic(cfg):
    p = load_domain(cfg.input_path)
    m = (cfg.m or [3])[0]
    try:
        sol = newton_solve_caustic(p, m, tol=_tol(cfg, "newton"), K_u=cfg.K)
    except (NewtonFailure, MonotonicityError) as exc:
        return False, {"m": m, "converged": False, "error": str(exc)}, None, None
    base = 2 * math.pi * np.arange(cfg.base_points) / cfg.base_points
    orbits = caustic_orbits(sol.candidate, base)
    refl = max(reflection_residual(p, Orbit(tuple(o), m)) for o in orbits)
    passed = sol.residual < _tol(cfg, "newton") and refl < _tol(cfg, "reflection")
    report = {"m": m, "converged": True, "iterations": sol.iterations,
              "residual_history": sol.history,
              "variational_residual": sol.residual, "reflection_residual": refl,
              "base_points": cfg.base_points, "candidate": sol.candidate.to_dict()}
    return passed, report, None, None


def cmd_obstruct(cfg):
    tol = _tol(cfg, "verdict")
    if cfg.input_path is None:
        K = cfg.K or 40
        n = cfg.iterations or 1000
        archive = None
        if cfg.output:
            archive = str(Path(cfg.output).with_suffix(".counterexamples.json"))
        res = rigidity_sweep(cfg.l, K, n, cfg.seed, tol=tol, archive=archive)
        report = {"sweep": res.to_dict(), "archive": archive if res.counterexamples else None}
        return not res.counterexamples, report, None, None
    p1, _ = load_perturbation(cfg.input_path)
    try:
        rep = quadratic_obstruction(cfg.l, p1, n_max=cfg.n_max, tol=tol)
    except HypothesisViolation as exc:
        raise InputError(f"{cfg.input_path}: {exc}") from exc
    cert = triviality_certificate(cfg.l, p1, tol=tol, n_max=cfg.n_max)
    report = {"obstruction": rep.to_dict(), "certificate": cert.to_dict()}
    header = ["n", "re", "im", "abs", "bare_re", "bare_im"]
    return rep.trivial_verdict, report, rep.csv_rows(), header


def cmd_orbit(cfg):
    p = load_domain(cfg.input_path)
    m = (cfg.m or [3])[0]
    iters = cfg.iterations or 100
    seed = ChordState(cfg.t0, cfg.t0 + 2 * math.pi / m)
    pts = iterate(p, seed, iters)
    x, y = boundary_point(p, np.mod(pts, 2 * math.pi))
    res = np.full(pts.size, np.nan)
    if pts.size >= 3:
        inner = reflection_residual(p, Orbit(tuple(pts), m), per_point=True)
        res[1:-1] = inner[1:-1]
    rows = [[j, float(pts[j]), float(x[j]), float(y[j]), float(res[j])] for j in range(pts.size)]
    worst = float(np.nanmax(res)) if pts.size >= 3 else 0.0
    rot = rotation_number(p, seed, iters) if iters >= 100 else None
    report = {"m": m, "iterations": iters, "max_residual": worst,
              "rotation_number": None if rot is None else {
                  "value": rot.value, "rational": rot.rational, "error": rot.error},
              "points": rows}
    header = ["j", "t_j", "x_j", "y_j", "residual_j"]
    return worst < _tol(cfg, "residual"), report, rows, header


HANDLERS = {
    "verify": cmd_verify,
    "expand": cmd_expand,
    "solve-caustic": cmd_solve_caustic,
    "obstruct": cmd_obstruct,
    "orbit": cmd_orbit,
    "width-check": cmd_width_check,
}

NEEDS_INPUT = {"verify", "solve-caustic", "orbit", "width-check"}


def run(cfg: RunConfig, stdout=None):
    """Execute one command; returns the exit status and always writes a report."""
    stdout = stdout or sys.stdout
    tols = dict(DEFAULT_TOLS[cfg.command])
    tols.update(cfg.tolerances)
    cfg.tolerances = tols
    try:
        cfg.validate()
        if cfg.command in NEEDS_INPUT and not cfg.input_path:
            raise InputError(f"{cfg.command} needs --input")
        passed, body, rows, header = HANDLERS[cfg.command](cfg)
        status = 0 if passed else 1
        error = None
    except InputError as exc:
        passed, body, rows, header = False, {}, None, None
        status, error = 2, str(exc)
        print(f"error: {error}", file=sys.stderr)
    report = {"schema": SCHEMA, "version": __version__, "command": cfg.command,
              "config": asdict(cfg), "passed": passed, "exit_status": status, **body}
    if error:
        report["error"] = error
    fmt = cfg.format if cfg.format in ("json", "csv") else "json"
    text = render(report, fmt, rows if fmt == "csv" else None, header)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        stdout.write(text)
    return status


def _parse_tol(items):
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"--tol expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(val)
        except ValueError as exc:
            raise InputError(f"--tol {name}: not a number: {val!r}") from exc
    return out


def _parse_m(text):
    if text is None:
        return None
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def build_parser():
    parser = argparse.ArgumentParser(
        prog="caustics", description="Rational caustics of billiards near the circle.",
        epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--input", dest="input_path", help="domain or perturbation JSON")
        sp.add_argument("--out", dest="output", help="report path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--K", type=int, help="truncation order (u for Newton, random series)")
        sp.add_argument("--m", help="modulus m, or list such as 2-7 or 2,3")
        sp.add_argument("--l", type=int, default=1, help="odd modulus index, M = 2l+1")
        sp.add_argument("--tol", action="append", metavar="NAME=VAL",
                        help=f"override a tolerance; defaults {DEFAULT_TOLS[name]}")
        sp.add_argument("--n-max", dest="n_max", type=int)
        sp.add_argument("--iters", dest="iterations", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--base-points", dest="base_points", type=int, default=64)
        sp.add_argument("--t0", type=float, default=0.0, help="orbit seed parameter")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(command=args.command, input_path=args.input_path, output=args.output,
                        format=args.format, tolerances=_parse_tol(args.tol), K=args.K,
                        m=_parse_m(args.m), l=args.l, n_max=args.n_max,
                        iterations=args.iterations, seed=args.seed,
                        base_points=args.base_points, t0=args.t0)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
