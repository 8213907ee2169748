"""Batch command line: sweeps, time series, probability reports, oracle runs, feasibility.

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical-validity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .cavity import CavityGeometry, Position, mean_B_squared, mean_energy_density
from .config import (
    ConfigError,
    Scenario,
    build_atom,
    build_field,
    build_grid,
    build_oracle_config,
    build_state,
    build_thresholds,
    build_window,
    load_scenario,
)
from .errors import InputError, NumericalValidityError
from .feasibility import RYDBERG_PRESET, ExperimentSetup, check_criteria
from .oracle import compare_first_order, exact_ratio
from .perturbation import (
    classify_regime,
    delta_P2,
    delta_P2_high_omega,
    delta_P2_low_omega,
    prob_P2,
    prob_P2_termwise,
    prob_P2_vacuum,
    qi_bound,
    ratio_P2,
    ratio_resonant_short,
)
from .states import (
    FieldPoint,
    PhotonState,
    make_vacuum_plus_two,
    mean_E_squared,
    mean_photon_number,
    negative_fraction,
    pair_correlation,
    subvac_maximum,
    subvac_minimum,
    worst_phase,
)

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def fmt(x: float) -> str:
    """17 significant digits: enough for an exact float round trip."""
    return format(float(x), ".17g")


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_csv(path: str | None, header_comments: list[str], columns: list[str], rows) -> str:
    buf = io.StringIO()
    for line in header_comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    _emit(path, text)
    return text


def _emit(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"{path}: cannot write output: {exc.strerror}") from None


def _pool_map(func, chunks, workers: int):
    """Map ``func`` over ``chunks`` and concatenate results in input order."""
    if workers <= 1 or len(chunks) <= 1:
        parts = [func(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(func, chunks))
    return np.concatenate(parts, axis=0)


def _split(grid: np.ndarray, workers: int):
    n = max(1, min(len(grid), 4 * max(workers, 1)))
    return [c for c in np.array_split(grid, n) if len(c)]


def _state_summary(s: PhotonState) -> dict:
    out = {"truncation_dim": s.truncation_dim, "mean_photon_number": mean_photon_number(s)}
    if s.truncation_dim >= 3:
        out["pair_correlation"] = pair_correlation(s)
        out["subvac_minimum"] = subvac_minimum(s)
        out["negative_fraction"] = negative_fraction(s)
    return out


# sweep-beta --------------------------------------------------------------

def _sweep_chunk(betas):
    rows = np.empty((len(betas), 3))
    for i, beta in enumerate(betas):
        s = make_vacuum_plus_two(float(beta))
        # phase 2 omega t0 at the minimum / maximum of <E^2>; omega = 1 without loss
        theta = worst_phase(s)
        rows[i] = (beta, ratio_resonant_short(s, 1.0, theta / 2.0),
                   ratio_resonant_short(s, 1.0, (theta + math.pi) / 2.0))
    return rows


def sweep_beta(betas: np.ndarray, workers: int = 1) -> np.ndarray:
    """Rows (beta, min ratio, max ratio) of the short-window on-resonance P2/P2(0)."""
    if np.any(betas < 0):
        raise InputError("beta range must lie in [0, inf)")
    return _pool_map(_sweep_chunk, _split(np.asarray(betas, float), workers), workers)


def cmd_sweep_beta(args, scn: Scenario) -> int:
    sweep = dict(scn.data.get("sweep") or {})
    if args.range is not None:
        sweep["start"], sweep["stop"] = args.range
    if args.steps is not None:
        sweep["steps"] = args.steps
    scn.data["sweep"] = sweep
    grid = build_grid(scn, "sweep", 0.0, 1.0, 101)
    if np.any(grid < 0):
        raise ConfigError(f"{scn.where('sweep')}: beta range must lie in [0, inf)")
    rows = sweep_beta(grid, args.workers)
    header = [
        f"subvac {__version__} sweep-beta",
        f"config_sha256: {scn.digest()}",
        "regime: resonant_short (omega*dt << 1, delta_eps ~ omega); ratio = 1 + <E^2>(t0)/f^2",
        "ratio_min / ratio_max: worst / best oscillation phase 2*omega*t0",
    ]
    write_csv(args.output, header, ["beta", "ratio_min", "ratio_max"], rows)
    if args.output is not None:
        k = int(np.argmin(rows[:, 1]))
        print(f"min ratio {rows[k, 1]:.6f} at beta = {rows[k, 0]:.6f} ({len(rows)} rows -> {args.output})")
    return EXIT_OK


# e2-timeseries -----------------------------------------------------------

def _e2_chunk(job):
    amps, geom, pos, fp, times = job
    s = PhotonState(amps)
    e2 = mean_E_squared(s, fp, times)
    if geom is None:
        b2 = np.full_like(times, np.nan)
        rho = np.full_like(times, np.nan)
    else:
        b2 = mean_B_squared(s, geom, pos, times)
        rho = mean_energy_density(s, geom, pos, times)
    return np.column_stack([times, e2, b2, rho])


def e2_timeseries(s: PhotonState, fp: FieldPoint, times: np.ndarray, geom: CavityGeometry | None = None,
                  pos: Position | None = None, workers: int = 1) -> np.ndarray:
    """Rows (t, <E^2>, <B^2>, rho); magnetic columns are NaN without a geometry."""
    jobs = [(s.amplitudes, geom, pos, fp, c) for c in _split(np.asarray(times, float), workers)]
    return _pool_map(_e2_chunk, jobs, workers)


def cmd_e2_timeseries(args, scn: Scenario) -> int:
    s = build_state(scn, args.seed)
    fp, geom, pos = build_field(scn)
    period = math.pi / fp.omega
    times = build_grid(scn, "time", 0.0, period, 2001)
    rows = e2_timeseries(s, fp, times, geom, pos, args.workers)
    header = [
        f"subvac {__version__} e2-timeseries",
        f"config_sha256: {scn.digest()}",
        "regime: none (field observables only)",
        f"omega: {fmt(fp.omega)}  f_squared: {fmt(fp.f_squared)}  E2 period pi/omega: {fmt(period)}",
        f"negative fraction of each period: {fmt(negative_fraction(s))}",
    ]
    write_csv(args.output, header, ["t", "E2", "B2", "rho"], rows)
    return EXIT_OK


# probability / delta-p2 --------------------------------------------------

def _physics_inputs(args, scn: Scenario):
    s = build_state(scn, args.seed)
    fp, _, _ = build_field(scn)
    atom = build_atom(scn, fp.omega)
    w = build_window(scn)
    return s, fp, atom, w


def _qi_block(s, fp, atom, w) -> dict:
    f = math.sqrt(fp.f_squared)
    low = delta_P2_low_omega(s, f, atom, w, omega=fp.omega)
    bound_w = qi_bound(fp.f_squared, atom, w)
    return {
        "delta_P2_low_omega": low,
        "bound_for_window": bound_w,
        "bound_uniform": qi_bound(fp.f_squared, atom),
        "margin": low - bound_w,
        "satisfied": bool(low >= bound_w - 1e-15 * abs(bound_w)),
    }


def probability_report(s, fp, atom, w, thresholds=None, qi_check=False) -> dict:
    f = math.sqrt(fp.f_squared)
    regime = classify_regime(fp.omega, atom, w, thresholds)
    short = {}
    if s.truncation_dim >= 3:
        short = {
            "ratio_resonant_short": ratio_resonant_short(s, fp.omega, w.t0),
            "ratio_resonant_short_min": 1.0 + subvac_minimum(s),
            "ratio_resonant_short_max": 1.0 + subvac_maximum(s),
        }
    report = {
        "command": "probability",
        "inputs": {"omega": fp.omega, "f_squared": fp.f_squared, "delta_eps": atom.delta_eps,
                   "dipole": atom.dipole, "t0": w.t0, "t1": w.t1},
        "state": _state_summary(s),
        "regime": regime.to_dict(),
        "P2": prob_P2(s, f, fp.omega, atom, w),
        "P2_termwise": prob_P2_termwise(s, f, fp.omega, atom, w),
        "P2_vacuum": prob_P2_vacuum(f, fp.omega, atom, w),
        "ratio_P2": ratio_P2(s, fp.omega, atom, w),
        "validity": "P2/P2(0) assumes decay into the single excited mode (near resonance only)",
        **short,
    }
    if qi_check:
        report["qi"] = _qi_block(s, fp, atom, w)
    return report


def delta_report(s, fp, atom, w, thresholds=None) -> dict:
    f = math.sqrt(fp.f_squared)
    return {
        "command": "delta-p2",
        "inputs": {"omega": fp.omega, "f_squared": fp.f_squared, "delta_eps": atom.delta_eps,
                   "dipole": atom.dipole, "t0": w.t0, "t1": w.t1},
        "state": _state_summary(s),
        "regime": classify_regime(fp.omega, atom, w, thresholds).to_dict(),
        "delta_P2": delta_P2(s, f, fp.omega, atom, w),
        "delta_P2_low_omega": delta_P2_low_omega(s, f, atom, w, omega=fp.omega),
        "delta_P2_high_omega": delta_P2_high_omega(s, f, fp.omega, atom, w),
        "qi": _qi_block(s, fp, atom, w),
        "note": "the far-above-resonance difference does not track <E^2>",
    }


def _render_text(d: dict, indent: str = "") -> str:
    lines = []
    for k in sorted(d):
        v = d[k]
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_render_text(v, indent + "  "))
        elif isinstance(v, float):
            lines.append(f"{indent}{k}: {v:.10g}")
        elif isinstance(v, complex):
            lines.append(f"{indent}{k}: {v.real:.10g} {v.imag:+.10g}i")
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(lines)


def _emit_report(args, scn: Scenario | None, report: dict, text: str | None = None):
    if scn is not None:
        report = {"config_sha256": scn.digest(), "version": __version__, **report}
    _emit(args.output, dump_json(report))
    if args.output is not None:
        print(text if text is not None else _render_text(report))


def cmd_probability(args, scn: Scenario) -> int:
    s, fp, atom, w = _physics_inputs(args, scn)
    qi = bool((scn.data.get("qi_check") or args.qi_check))
    _emit_report(args, scn, probability_report(s, fp, atom, w, build_thresholds(scn), qi))
    return EXIT_OK


def cmd_delta_p2(args, scn: Scenario) -> int:
    s, fp, atom, w = _physics_inputs(args, scn)
    _emit_report(args, scn, delta_report(s, fp, atom, w, build_thresholds(scn)))
    return EXIT_OK


# oracle-compare ----------------------------------------------------------

def cmd_oracle_compare(args, scn: Scenario) -> int:
    s, fp, atom, w = _physics_inputs(args, scn)
    cfg = build_oracle_config(scn)
    f = math.sqrt(fp.f_squared)
    cmp = compare_first_order(s, f, fp.omega, atom, w, cfg)
    report = {
        "command": "oracle-compare",
        "inputs": {"omega": fp.omega, "f_squared": fp.f_squared, "delta_eps": atom.delta_eps,
                   "dipole": atom.dipole, "t0": w.t0, "t1": w.t1},
        "oracle": {"truncation_dim": cfg.truncation_dim, "integrator": cfg.integrator,
                   "tolerance": cfg.tolerance, "steps": cfg.steps},
        "state": _state_summary(s),
        "regime": classify_regime(fp.omega, atom, w, build_thresholds(scn)).to_dict(),
        "comparison": cmp.to_dict(),
        "exact_ratio": exact_ratio(s, f, fp.omega, atom, w, cfg),
        "first_order_ratio": ratio_P2(s, fp.omega, atom, w),
    }
    _emit_report(args, scn, report)
    return EXIT_OK


# feasibility -------------------------------------------------------------

_SETUP_FIELDS = ("cavity_a", "cavity_b", "cavity_d", "transition_frequency",
                 "atom_size", "atom_speed", "lifetime_tau", "beta")


def build_setup(scn: Scenario) -> ExperimentSetup:
    sec = scn.section("experiment") or {}
    preset = sec.get("preset", "rydberg")
    if preset != "rydberg":
        raise ConfigError(f"{scn.where('experiment', 'preset')}: unknown preset {preset!r}")
    values = {k: getattr(RYDBERG_PRESET, k) for k in _SETUP_FIELDS}
    for k in _SETUP_FIELDS:
        if k in sec:
            values[k] = scn.number("experiment", k)
    unknown = set(sec) - set(_SETUP_FIELDS) - {"preset", "much_less"}
    if unknown:
        raise ConfigError(f"{scn.where('experiment', sorted(unknown)[0])}: unknown field")
    try:
        return ExperimentSetup(**values)
    except InputError as exc:
        raise ConfigError(f"{scn.where('experiment')}: {exc}") from None


def cmd_feasibility(args, scn: Scenario) -> int:
    setup = build_setup(scn)
    much_less = scn.number("experiment", "much_less", 0.05) if scn.section("experiment") else 0.05
    report = check_criteria(setup, much_less)
    _emit_report(args, scn, {"command": "feasibility", **report.to_dict()}, report.render_text())
    return EXIT_OK


COMMANDS = {
    "sweep-beta": (cmd_sweep_beta, "short-window ratio P2/P2(0) vs beta for (|0> + beta|2>)"),
    "e2-timeseries": (cmd_e2_timeseries, "<E^2>, <B^2> and energy density vs time (CSV)"),
    "probability": (cmd_probability, "first-order P2, P2(0), their ratio and regime (JSON)"),
    "delta-p2": (cmd_delta_p2, "P2 - P2(0) with its limits and lower bound (JSON)"),
    "oracle-compare": (cmd_oracle_compare, "exact evolution vs first-order P2 (JSON)"),
    "feasibility": (cmd_feasibility, "experimental criteria for the Rydberg setup (JSON + text)"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subvac", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"subvac {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("-c", "--config", help="YAML scenario file")
        p.add_argument("-o", "--output", help="output path (default: stdout)")
        p.add_argument("-j", "--workers", type=int, default=1, help="worker processes for sweeps")
        p.add_argument("--seed", type=int, default=None, help="seed for 'random' states")
        if name == "sweep-beta":
            p.add_argument("--range", nargs=2, type=float, metavar=("START", "STOP"))
            p.add_argument("--steps", type=int)
        if name == "probability":
            p.add_argument("--qi-check", action="store_true", help="add the lower-bound check")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        if args.workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {args.workers}")
        scn = load_scenario(args.config)
        return func(args, scn)
    except (ConfigError, InputError) as exc:
        print(f"subvac: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalValidityError as exc:
        print(f"subvac: numerical validity error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BrokenPipeError:
        # reader went away (e.g. `| head`); silence the flush at interpreter exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_IO
    except OSError as exc:
        print(f"subvac: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
