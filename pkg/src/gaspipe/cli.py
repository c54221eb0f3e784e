"""Command-line front end.

Every subcommand reads the six pipe parameters from a JSON config and writes
CSV (to ``--output`` or stdout) with floats at 17 significant digits, so
repeated runs are byte-identical.  Exit status: 0 ok, 1 failed validation or
rejected input, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import meromorphic, spectral
from .errors import GasPipeError
from .params import REFERENCE_ALPHA, REFERENCE_K_G, derive_constants, load_params
from .simulate import TimeSeries, crosscheck, lumped_simulate, snap_dt, statespace_simulate
from .statespace import build_state_space, build_transformed_realization
from .transferfn import bode, gain_constants

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("spectrum", "gain", "expansion")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _consts(args):
    return derive_constants(load_params(args.config))


# -- subcommands ------------------------------------------------------------


def cmd_constants(args) -> int:
    k = _consts(args)
    rows = [
        ("alpha", k.alpha),
        ("t_d", k.t_d),
        ("omega0", k.omega0),
        ("k_g", k.k_g),
        ("beta", k.beta),
        ("area", k.area),
        ("alpha_reference", REFERENCE_ALPHA),
        ("k_g_reference", REFERENCE_K_G),
        ("k_g_gap_percent", 100.0 * (k.k_g - REFERENCE_K_G) / REFERENCE_K_G),
    ]
    with _sink(args.output) as fh:
        w = _writer(fh)
        w.writerow(["name", "value"])
        for name, value in rows:
            w.writerow([name, _fmt(value)])
    return EXIT_OK


def _write_roots(fh, pairs, lambda0=None):
    w = _writer(fh)
    w.writerow(["k", "re", "im"])
    if lambda0 is not None:
        w.writerow([0, _fmt(lambda0), _fmt(0.0)])
    for k, (up, lo) in enumerate(pairs.pair_values(), start=1):
        for z in (up, lo):
            w.writerow([k, _fmt(z.real), _fmt(z.imag)])


def cmd_eigen(args) -> int:
    k = _consts(args)
    if args.asymptotic:
        spec = spectral.eigenvalues_asymptotic(k, args.kmax)
    else:
        spec = spectral.eigenvalues_closed_form(k, args.n)
    with _sink(args.output) as fh:
        _write_roots(fh, spec, spec.lambda0)
    return EXIT_OK


def cmd_zeros(args) -> int:
    k = _consts(args)
    if args.asymptotic:
        zs = spectral.zeros_closed_form(k, None, args.channel, k_max=args.kmax)
    else:
        zs = spectral.zeros_closed_form(k, args.n, args.channel)
    with _sink(args.output) as fh:
        _write_roots(fh, zs)
    return EXIT_OK


def cmd_bode(args) -> int:
    k = _consts(args)
    fr = bode(
        k,
        omega_min=args.wmin,
        omega_max=args.wmax,
        points=args.points,
        evaluator=args.evaluator,
        order=args.order,
        n_segments=args.n,
        workers=args.threads,
    )
    wrap = not args.wrapped
    cols = [fr.mag_db("g11"), fr.phase_deg("g11", wrap), fr.mag_db("g21"), fr.phase_deg("g21", wrap)]
    with _sink(args.output) as fh:
        w = _writer(fh)
        w.writerow(["omega_rad_s", "mag_db_g11", "phase_deg_g11", "mag_db_g21", "phase_deg_g21", "flags"])
        for i, om in enumerate(fr.omega):
            w.writerow([_fmt(om)] + [_fmt(c[i]) for c in cols] + ["near_pole" if fr.flags[i] else ""])
    return EXIT_OK


def cmd_simulate(args) -> int:
    k = _consts(args)
    series = TimeSeries.from_csv(args.input)
    dt, m = snap_dt(k.t_d, args.dt if args.dt is not None else series.dt)
    if not math.isclose(dt, series.dt, rel_tol=1e-9):
        series = series.resample(dt)
    if dt * (len(series) - 1) < 2 * k.t_d:
        print(f"warning: horizon shorter than 2*t_d = {2 * k.t_d:.6g} s; output is transient only", file=sys.stderr)
    out = {}
    if args.model in ("compact", "both"):
        lumped = lumped_simulate(k, series, offtake_sign=args.offtake_sign, absolute=args.absolute)
        out["p1"], out["p2"] = lumped["p1"], lumped["p2"]
    if args.model in ("statespace", "both"):
        ss = statespace_simulate(k, series, args.n)
        key = "_ss" if args.model == "both" else ""
        out["p1" + key], out["p2" + key] = ss["p1"], ss["p2"]
    result = TimeSeries(series.t0, dt, out)
    if args.output in (None, "-"):
        w = _writer(sys.stdout)
        w.writerow(["t", *out])
        for i, t in enumerate(result.time):
            w.writerow([_fmt(t)] + [_fmt(out[c][i]) for c in out])
    else:
        result.to_csv(args.output)
    print(f"dt = {_fmt(dt)} s ({m} samples per t_d)", file=sys.stderr)
    return EXIT_OK


# -- validation suites --------------------------------------------------------


def _suite_spectrum(k, n):
    model = build_state_space(k, n)
    rep = spectral.validate_spectrum(model, spectral.eigenvalues_closed_form(k, n))
    yield "closed-form eigenvalues vs dense solver", rep.max_mismatch, rep.tolerance
    v0 = spectral.null_eigenvector(n)
    yield "A v0 = 0", float(np.max(np.abs(model.a @ v0))), 1e-12 * float(np.max(np.abs(model.a)))
    lam = spectral.numeric_eigenvalues(model.a)
    lam_t = spectral.numeric_eigenvalues(build_transformed_realization(k, n).a)
    _, d = spectral.match_nearest(lam, lam_t)
    yield "physical vs transformed spectrum", float(d.max()), 1e-8 * max(1.0, float(np.abs(lam).max()))
    zeros = spectral.zeros_closed_form(k, n, "g11").values()
    _, d = spectral.match_nearest(zeros, spectral.numeric_zeros(model, "g11"))
    yield "closed-form G11 zeros vs Rosenbrock pencil", float(d.max()), 1e-8 * max(1.0, float(np.abs(zeros).max()))


def _suite_gain(k, n):
    model = build_state_space(k, n)
    g = spectral.gain(k, n)
    yield "projection gain vs closed form", abs(spectral.projection_gain(model) - g), 1e-12 * g
    gc = gain_constants(k, 100_000)
    yield "K11 bar partial product", abs(gc.k_bar_11_partial - gc.k_bar_11), 1e-6
    yield "K12 bar partial product", abs(gc.k_bar_12_partial - gc.k_bar_12), 1e-6


def _suite_expansion(k, n):
    t_d = k.t_d
    rng = np.random.default_rng(0)
    samples = (rng.uniform(0.05, 3.0, 20) + 1j * rng.uniform(-10.0, 10.0, 20)) * np.pi / t_d
    rep = meromorphic.verify_identities(t_d, samples)
    yield "pole expansions reproduce the closed forms", rep.max_deviation, rep.tolerance
    worst = 0.0
    for name in ("f", "v"):
        for term in meromorphic.residues(name, range(-3, 4), t_d):
            num = meromorphic.numeric_residue(lambda s: meromorphic.eval_closed(name, s, t_d), term.pole, 0.1 / t_d)
            worst = max(worst, abs(num - term.residue) * 2 * t_d)
    yield "residue formulas vs ring average (scaled by 2 t_d)", worst, 1e-6


_SUITES = {"spectrum": _suite_spectrum, "gain": _suite_gain, "expansion": _suite_expansion}


def cmd_validate(args) -> int:
    k = _consts(args)
    names = SUITES if args.suite == "all" else (args.suite,)
    failed = []
    for suite in names:
        for label, err, tol in _SUITES[suite](k, args.n):
            ok = err <= tol
            print(f"[{'PASS' if ok else 'FAIL'}] {suite}: {label} (error {err:.3e}, tolerance {tol:.3e})")
            if not ok:
                failed.append(f"{suite}: {label}")
    if failed:
        print(f"{len(failed)} check(s) failed:", file=sys.stderr)
        for item in failed:
            print(f"  - {item}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_crosscheck(args) -> int:
    k = _consts(args)
    series = TimeSeries.from_csv(args.input)
    dt, _ = snap_dt(k.t_d, series.dt)
    if not math.isclose(dt, series.dt, rel_tol=1e-9):
        series = series.resample(dt)
    rep = crosscheck(k, series, args.n, offtake_sign=args.offtake_sign)
    print(json.dumps({ch: {"max_abs": rep.max_abs[ch], "rms": rep.rms[ch], "relative_rms": rep.relative_rms(ch)} for ch in ("p1", "p2")}, indent=2))
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaspipe", description="Linear transient models of a single gas pipe.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON file with the six pipe parameters")
        p.set_defaults(func=func)
        return p

    p = add("constants", cmd_constants, "derived constants and reference values")
    p.add_argument("--output", help="CSV path (default stdout)")

    for name, func, help_text in (("eigen", cmd_eigen, "poles of the state-space model"), ("zeros", cmd_zeros, "transmission zeros of one channel")):
        p = add(name, func, help_text)
        p.add_argument("--n", type=_positive_int, default=50, help="number of segments N")
        p.add_argument("--asymptotic", action="store_true", help="N -> infinity values instead")
        p.add_argument("--kmax", type=_positive_int, default=10, help="pairs to list with --asymptotic")
        p.add_argument("--output", help="CSV path (default stdout)")
        if name == "zeros":
            p.add_argument("--channel", choices=["g11", "g12", "g21", "g22"], default="g11")

    p = add("bode", cmd_bode, "frequency response sweep")
    p.add_argument("--evaluator", choices=["truncated", "compact", "resolvent", "exact"], default="compact")
    p.add_argument("--order", type=_positive_int, default=None, help="truncation order n (truncated)")
    p.add_argument("--n", type=_positive_int, default=None, help="segments N (resolvent)")
    p.add_argument("--wmin", type=_positive_float, default=1e-4)
    p.add_argument("--wmax", type=_positive_float, default=1.0)
    p.add_argument("--points", type=_positive_int, default=400)
    p.add_argument("--wrapped", action="store_true", help="phase wrapped to (-180, 180]")
    p.add_argument("--threads", type=_positive_int, default=None, help="overrides GASPIPE_THREADS")
    p.add_argument("--output", help="CSV path (default stdout)")

    p = add("simulate", cmd_simulate, "time-domain pressures from flow inputs")
    p.add_argument("--input", required=True, help="CSV with header t,q1,q2")
    p.add_argument("--dt", type=_positive_float, default=None, help="step, snapped to t_d/m with m >= 100")
    p.add_argument("--model", choices=["compact", "statespace", "both"], default="compact")
    p.add_argument("--n", type=_positive_int, default=400, help="segments N for the state-space model")
    p.add_argument("--offtake-sign", choices=["statespace", "printed"], default="statespace")
    p.add_argument("--absolute", action="store_true", help="add steady end pressures (compact output)")
    p.add_argument("--output", help="CSV path (default stdout)")

    p = add("validate", cmd_validate, "run the numerical self-checks")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--n", type=_positive_int, default=50, help="segments N for the spectrum and gain suites")

    p = add("crosscheck", cmd_crosscheck, "compare compact and state-space simulations")
    p.add_argument("--input", required=True, help="CSV with header t,q1,q2")
    p.add_argument("--n", type=_positive_int, default=400)
    p.add_argument("--offtake-sign", choices=["statespace", "printed"], default="statespace")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GasPipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
