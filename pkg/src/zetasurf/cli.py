"""Command-line front end: parse a surface/mass specification, dispatch the
verifiers, and emit machine-readable reports.

Reports are JSON (default) or a flat CSV projection.  Every float is printed
with 17 significant digits so reports can be diffed against oracles; repeated
invocations with the same flags (including --seed and --threads) produce
byte-identical output apart from the timestamp and runtime_ms fields.

Exit codes: 0 all checks pass, 2 at least one check failed, 1 usage or
validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .anomaly import (mass_shift_prefactor, residue_phase_space, verify_anomaly,
                      verify_massless)
from .gff import reweighted_mode_variance, verify_measure_identity
from .green import cf_mean, det2, gamma0, torus_cf_image_sum
from .heat import heat_coeffs, heat_integral, heat_trace
from .sumtools import neville_zero
from .surfaces import parse_surface
from .zeta import laurent_fit, zeta_det

_EULER = float(np.euler_gamma)
_FOUR_PI = 4.0 * math.pi

COMMANDS = ("heat-trace", "det-zeta", "det2", "cf", "verify-anomaly",
            "verify-mainlemma", "verify-massless", "gff-verify", "verify-all")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# ------------------------------------------------------------- JSON with 17g

def _render_json(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  {_render_json(str(k))}: {_render_json(v, indent + 1)}'
            for k, v in obj.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{pad}  {_render_json(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return '"%s"' % repr(x)
        return format(x, ".17g")
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\t", "\\t")
        return f'"{out}"'
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}.{i}", v, rows)
    else:
        if isinstance(obj, (float, np.floating)):
            obj = format(float(obj), ".17g")
        rows.append((prefix, obj))


def _render_csv(report: dict) -> str:
    rows = []
    _flatten("", report, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def _emit(report: dict, args) -> None:
    text = _render_csv(report) if args.format == "csv" else _render_json(report) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------ commands

def _cmd_heat_trace(args) -> tuple[list, bool]:
    model = parse_surface(args.surface)
    msq = args.m0 * args.m0
    ts = args.t if args.t else [2.0 ** -j for j in range(0, 8)]
    coeffs = heat_coeffs(model, msq)
    values = [{"t": t, "theta": heat_trace(model, msq, t)} for t in ts]
    rec = {"check": "heat-trace", "surface": model.label(), "msq": msq,
           "a_minus1": coeffs.a_minus1, "a_0": coeffs.a_0,
           "values": values, "pass": True}
    return [rec], True


def _cmd_det_zeta(args) -> tuple[list, bool]:
    model = parse_surface(args.surface)
    msq = args.m0 * args.m0
    res = zeta_det(model, msq, exclude_zero_mode=(msq == 0.0),
                   tol=min(args.tol, 1e-4))
    rec = {"check": "det-zeta", "surface": model.label(), "msq": msq,
           "zeta0": res.zeta0, "zeta_prime0": res.zeta_prime0,
           "det_zeta": res.det_zeta, "err_bound": res.err_bound,
           "excluded_zero_modes": res.excluded_zero_modes, "pass": True}
    return [rec], True


def _cmd_det2(args) -> tuple[list, bool]:
    model = parse_surface(args.surface)
    res = det2(model, args.m0 * args.m0, args.m1 * args.m1, lam_max=args.lambda_max)
    rec = {"check": "det2", "surface": model.label(),
           "m0sq": args.m0 * args.m0, "m1sq": args.m1 * args.m1,
           "lam_max": res.lam_max, "log_value": res.log_value, "value": res.value,
           "truncated_log": res.truncated_log,
           "tail_correction": res.tail_correction, "tail_bound": res.tail_bound,
           "pass": True}
    return [rec], True


def _cmd_cf(args) -> tuple[list, bool]:
    model = parse_surface(args.surface)
    m0sq = args.m0 * args.m0
    heat_part = cf_mean(model, m0sq)
    integral = heat_integral(model, m0sq)
    rec = {"check": "cf", "surface": model.label(), "m0": args.m0,
           "gamma0": heat_part.gamma0, "cf_mean_heat": heat_part.cf_mean,
           "heat_integral": integral.value,
           "heat_integral_bound": integral.abs_error_bound,
           "quadrature_profile": integral.quadrature_profile}
    ok = True
    if model.kind == "torus":
        image = torus_cf_image_sum(model.l1, model.l2, args.m0)
        diff = abs(heat_part.cf_mean - image.cf_mean)
        ok = diff <= max(args.tol, 1e-6)
        rec.update({"cf_mean_image": image.cf_mean, "abs_diff": diff})
    rec["pass"] = bool(ok)
    return [rec], ok


def _cmd_verify_anomaly(args) -> tuple[list, bool]:
    model = parse_surface(args.surface)
    report = verify_anomaly(model, args.m0 * args.m0, args.m1 * args.m1, tol=args.tol)
    return [report.to_dict()], report.passed


def _mainlemma_record(model, m0sq, tol) -> dict:
    fit = laurent_fit(model, m0sq)
    integral = heat_integral(model, m0sq)
    phase = residue_phase_space(model)
    weyl = model.area / _FOUR_PI
    # fit-model error gauge: refit on the halved grid; the s^2-truncation
    # error scales down by ~16, so the difference bounds the model bias
    fine = laurent_fit(model, m0sq, s_grid=[s / 2 for s in fit.fit_diagnostics["s_grid"]])
    model_err = abs(fine.finite_part - fit.finite_part)
    residue_ok = (abs(fit.residue - weyl) <= tol and abs(fit.residue - phase) <= tol)
    finite_diff = abs(fit.finite_part - integral.value)
    finite_ok = finite_diff <= max(tol, 2.0 * model_err + integral.abs_error_bound)
    return {
        "check": "mainlemma-laurent",
        "surface": model.label(), "m0sq": m0sq,
        "residue_fit": fit.residue, "residue_weyl": weyl, "residue_phase_space": phase,
        "finite_part_fit": fit.finite_part, "heat_integral": integral.value,
        "finite_part_abs_diff": finite_diff, "fit_model_err": model_err,
        "fit_diagnostics": fit.fit_diagnostics,
        "pass": bool(residue_ok and finite_ok),
    }


def _cmd_verify_mainlemma(args) -> tuple[list, bool]:
    model = parse_surface(args.surface)
    rec = _mainlemma_record(model, args.m0 * args.m0, max(args.tol, 1e-4))
    return [rec], rec["pass"]


def _cmd_verify_massless(args) -> tuple[list, bool]:
    model = parse_surface(args.surface)
    report = verify_massless(model, args.sigma, tol=args.tol)
    return [report.to_dict()], report.passed


def _gff_record(model, m0, m1, lam_max, n, seed, threads) -> dict:
    est = verify_measure_identity(model, m0, m1, lam_max, n, seed, threads=threads)
    rw = reweighted_mode_variance(model, m0, m1, lam_max, n, seed, mode=0,
                                  threads=threads)
    d2 = det2(model, m0 * m0, m1 * m1, lam_max=lam_max)
    det2_target = math.exp(-0.5 * d2.truncated_log)
    target_match = abs(est.target / det2_target - 1.0)
    ok = abs(est.z_score) < 3.0 and abs(rw.z_score) < 4.0 and target_match <= 1e-12
    return {
        "check": "gff-measure-identity",
        "surface": model.label(), "m0": m0, "m1": m1, "lam_max": lam_max,
        "n_samples": n, "seed": seed,
        "mean": est.mean, "stderr": est.stderr, "target": est.target,
        "z_score": est.z_score,
        "reweighted_mode0": {"mean": rw.mean, "stderr": rw.stderr,
                             "target": rw.target, "z_score": rw.z_score},
        "det2_truncated_match": target_match,
        "pass": bool(ok),
    }


def _cmd_gff_verify(args) -> tuple[list, bool]:
    model = parse_surface(args.surface)
    rec = _gff_record(model, args.m0, args.m1, args.lambda_max, args.samples,
                      args.seed, args.threads)
    return [rec], rec["pass"]


def _cmd_verify_all(args) -> tuple[list, bool]:
    results = []
    surfaces = ["sphere:R=1", "torus:L1=1,L2=1", "torus:L1=1,L2=2"]
    models = [parse_surface(s) for s in surfaces]

    # determinant mass-shift identity across the acceptance grid
    zcache: dict = {}

    def zdet(model, msq):
        key = (model.label(), msq)
        if key not in zcache:
            zcache[key] = zeta_det(model, msq)
        return zcache[key]

    for model in models:
        for m0sq in (0.5, 1.0, 4.0):
            integral = heat_integral(model, m0sq)
            base = zdet(model, m0sq)
            d2cache = {m1sq: det2(model, m0sq, m1sq) for m1sq in (0.0, 1.0, 2.0)}
            for m1sq in (0.0, 1.0, 2.0):
                shift = zdet(model, m0sq + m1sq)
                d2 = d2cache[m1sq]
                rhs = base.det_zeta * d2.value * math.exp(m1sq * integral.value)
                rel = abs(shift.det_zeta / rhs - 1.0)
                budget = (shift.err_bound + base.err_bound + d2.tail_bound
                          + m1sq * integral.abs_error_bound)
                results.append({
                    "check": "anomaly-grid", "surface": model.label(),
                    "m0sq": m0sq, "m1sq": m1sq, "rel_residual": rel,
                    "error_budget": budget,
                    "pass": bool(rel <= max(budget, args.tol)),
                })

    # Laurent structure and the three-way residue agreement
    for model in models:
        results.append(_mainlemma_record(model, 1.0, 1e-4))

    # heat coefficients: sphere constant 1/3, torus constant 0
    sphere, torus11 = models[0], models[1]
    ts = [0.02, 0.01, 0.005]
    vals = [heat_trace(sphere, 0.0, t) - 1.0 / t for t in ts]
    a0_fit, _ = neville_zero(ts, vals)
    torus_const = heat_trace(torus11, 0.0, 0.01) - torus11.area / (_FOUR_PI * 0.01)
    results.append({
        "check": "heat-coefficients",
        "sphere_a0_fit": a0_fit, "sphere_a0_exact": 1.0 / 3.0,
        "torus_const_at_t_0.01": torus_const,
        "pass": bool(abs(a0_fit - 1.0 / 3.0) < 1e-4 and abs(torus_const) < 1e-8),
    })

    # two-oracle C_f on the unit torus
    heat_part = cf_mean(torus11, 1.0)
    image = torus_cf_image_sum(1.0, 1.0, 1.0)
    diff = abs(heat_part.cf_mean - image.cf_mean)
    results.append({
        "check": "cf-two-oracle", "surface": torus11.label(),
        "cf_heat": heat_part.cf_mean, "cf_image": image.cf_mean, "abs_diff": diff,
        "pass": bool(diff <= 1e-6),
    })

    # special bare mass 4 e^{-gamma}
    m_special = 4.0 * math.exp(-_EULER)
    g0 = gamma0(m_special)
    pref = mass_shift_prefactor(sphere, m_special, 1.0)
    results.append({
        "check": "special-bare-mass", "m0": m_special, "gamma0": g0,
        "prefactor": pref,
        "pass": bool(abs(g0) < 1e-14 and abs(pref - 1.0) < 1e-12),
    })

    # massless limit on the sphere
    results.append(verify_massless(sphere, 1.0).to_dict())

    # prefactor identity on seeded random (m0, sigma) pairs
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((args.seed, 9))))
    worst = 0.0
    for _ in range(10):
        m0r = float(rng.uniform(0.05, 5.0))
        sig = float(rng.uniform(0.1, 4.0))
        expo = sig * sphere.area / _FOUR_PI
        m = math.sqrt(sig)
        lhs = (m / m0r) ** expo * math.exp(0.5 * sig * gamma0(m0r) * sphere.area)
        rhs = (0.25 * m * math.exp(_EULER)) ** expo
        worst = max(worst, abs(lhs / rhs - 1.0))
    results.append({"check": "prefactor-identity-random", "max_rel_diff": worst,
                    "pass": bool(worst <= 1e-12)})

    # GFF measure identity
    results.append(_gff_record(sphere, 1.0, 1.0, 42.0, args.samples, args.seed,
                               args.threads))

    ok = all(r.get("pass", True) for r in results)
    return results, ok


_DISPATCH = {
    "heat-trace": _cmd_heat_trace,
    "det-zeta": _cmd_det_zeta,
    "det2": _cmd_det2,
    "cf": _cmd_cf,
    "verify-anomaly": _cmd_verify_anomaly,
    "verify-mainlemma": _cmd_verify_mainlemma,
    "verify-massless": _cmd_verify_massless,
    "gff-verify": _cmd_gff_verify,
    "verify-all": _cmd_verify_all,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="zetasurf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--surface", default="sphere:R=1",
                       help="sphere:R=<float> or torus:L1=<float>,L2=<float>")
        p.add_argument("--m0", type=float, default=1.0, help="bare mass m0")
        p.add_argument("--m1", type=float, default=0.0, help="mass shift m1")
        p.add_argument("--sigma", type=float, default=1.0)
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--lambda-max", dest="lambda_max", type=float, default=2e5)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--samples", type=int, default=1000000)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--threads", type=int,
                       default=int(os.environ.get("ZETASURF_THREADS",
                                                  os.cpu_count() or 1)))
        if name == "heat-trace":
            p.add_argument("--t", type=float, action="append", default=None)
        if name == "gff-verify":
            p.set_defaults(lambda_max=42.0, m1=1.0)
    return parser


def _validate_config(args) -> None:
    # fail fast, naming the offending flag, before any computation starts
    if args.m0 < 0:
        raise ValueError("--m0 must be >= 0")
    if args.m1 < 0:
        raise ValueError("--m1 must be >= 0")
    if args.sigma <= 0:
        raise ValueError("--sigma must be positive")
    if args.tol <= 0:
        raise ValueError("--tol must be positive")
    if args.lambda_max <= 0:
        raise ValueError("--lambda-max must be positive")
    if args.samples < 1:
        raise ValueError("--samples must be >= 1")
    if args.threads < 1:
        raise ValueError("--threads must be >= 1")


def main(argv=None) -> int:
    t0 = time.perf_counter()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        _validate_config(args)
        results, ok = _DISPATCH[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    inputs = {
        "surface": args.surface, "m0": args.m0, "m1": args.m1,
        "sigma": args.sigma, "tol": args.tol, "lambda_max": args.lambda_max,
        "seed": args.seed, "samples": args.samples, "threads": args.threads,
    }
    report = {
        "command": args.command,
        "inputs": inputs,
        "results": results,
        "pass": bool(ok),
        "runtime_ms": int((time.perf_counter() - t0) * 1000),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
    }
    _emit(report, args)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
