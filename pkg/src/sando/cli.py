"""Command-line entry point.

    sando <subcommand> CONFIG.json [--output-dir DIR] [--workers N]

Each run writes its table(s) and a ``manifest.json`` into the output
directory. Exit codes: 0 ok, 2 config error, 3 numerical failure,
4 compression bracket not found.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from sando import __version__, analysis
from sando.cell import club_at
from sando.config import RunConfig, parse_config
from sando.dispersion import cutoff, wavenumber
from sando.errors import BracketNotFoundError, ConfigError, InvalidParameterError, NumericalFailure, SandoError
from sando.units import current_to_dbm, freq_to_normalized, normalized_to_freq

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_BRACKET = 4

ENV_OUTPUT_DIR = "SANDO_OUTPUT_DIR"
ENV_WORKERS = "SANDO_WORKERS"

SPECTRUM_HEADER = ["f_ghz", "gain_db", "k_s", "k_i", "delta_k", "flag"]


def fmt(value) -> str:
    """Shortest round-trip text for a number; blank for NaN."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    return repr(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _ghz(f_hz: float) -> float:
    # keeps grid multiples like 10.05 exact in the CSV
    return round(f_hz / 1e9, 12)


def _frequencies(cfg: RunConfig) -> np.ndarray:
    return cfg.spectrum.f_s.samples() * 1e9


def cmd_dispersion(cfg: RunConfig, out: Path, workers: int) -> dict:
    model = cfg.model()
    f = _frequencies(cfg)
    rows = []
    for fs in f:
        w = freq_to_normalized(fs, model)
        flag, k, club = "", math.nan, math.nan
        try:
            club = club_at(model, w)
            k = wavenumber(w, model)
        except SandoError as exc:
            flag = analysis.flag_for(exc)
        rows.append((_ghz(fs), w, k, club, flag))
    write_csv(out / "dispersion.csv", ["f_ghz", "omega", "k", "club", "flag"], rows)
    return {
        "files": ["dispersion.csv"],
        "grid_shape": [len(f)],
        "cutoff_ghz": normalized_to_freq(cutoff(model), model) / 1e9,
    }


def cmd_spectrum(cfg: RunConfig, out: Path, workers: int) -> dict:
    grid = analysis.gain_spectrum(
        _frequencies(cfg),
        cfg.f_p_hz,
        cfg.model(),
        engine=cfg.engine,
        ic=cfg.initial_conditions(),
        settings=cfg.integrator_settings(),
        guard_hz=cfg.spectrum.guard_ghz * 1e9,
        workers=workers,
    )
    v = grid.values
    rows = [
        (_ghz(f), v["gain_db"][0, i], v["k_s"][0, i], v["k_i"][0, i], v["delta_k"][0, i], grid.flags[0, i])
        for i, f in enumerate(grid.axis1)
    ]
    write_csv(out / "spectrum.csv", SPECTRUM_HEADER, rows)
    g_max, f_max = grid.max_gain()
    return {
        "files": ["spectrum.csv"],
        "grid_shape": list(grid.shape),
        "max_gain_db": g_max,
        "f_at_max_ghz": _ghz(f_max) if math.isfinite(f_max) else None,
    }


def cmd_njj_scan(cfg: RunConfig, out: Path, workers: int) -> dict:
    sc = cfg.scan
    scan = analysis.njj_scan(
        sc.f_s * 1e9,
        cfg.f_p_hz,
        cfg.model(),
        n_max=sc.n_max,
        ic=cfg.initial_conditions(),
        settings=cfg.integrator_settings(),
        stride=sc.stride,
        guard_hz=cfg.spectrum.guard_ghz * 1e9,
    )
    rows = zip(scan.n_jj, scan.gain_db, scan.signal_power, scan.idler_power, scan.pump_power, scan.theta)
    header = ["n_jj", "gain_db", "signal_power", "idler_power", "pump_power", "theta"]
    write_csv(out / "njj_scan.csv", header, rows)
    first = scan.first_max
    return {
        "files": ["njj_scan.csv"],
        "grid_shape": [len(scan.n_jj)],
        "first_max": None if first is None else {"n_jj": first[0], "gain_db": first[1]},
        "pump_deviation": scan.pump_deviation,
    }


def cmd_sweep(cfg: RunConfig, out: Path, workers: int) -> dict:
    sw = cfg.sweep
    values = sw.values.samples()
    axis_values = values * 1e9 if sw.axis == "f_p" else values
    grid = analysis.sweep_2d(
        _frequencies(cfg),
        sw.axis,
        axis_values,
        cfg.model(),
        f_p=cfg.f_p_hz,
        engine=cfg.engine,
        ic=cfg.initial_conditions(),
        settings=cfg.integrator_settings(),
        guard_hz=cfg.spectrum.guard_ghz * 1e9,
        workers=workers,
    )
    name = "f_p_ghz" if sw.axis == "f_p" else sw.axis
    fields = list(analysis.CELL_FIELDS)
    rows = []
    for j, a in enumerate(values):
        for i, f in enumerate(grid.axis1):
            rows.append([round(float(a), 12), _ghz(f)] + [grid.values[k][j, i] for k in fields] + [grid.flags[j, i]])
    write_csv(out / "sweep.csv", [name, "f_ghz"] + fields + ["flag"], rows)
    return {"files": ["sweep.csv"], "grid_shape": list(grid.shape), "axis2": name}


def cmd_compression(cfg: RunConfig, out: Path, workers: int) -> dict:
    c = cfg.compression
    res = analysis.compression_point(
        cfg.model(),
        f_p=cfg.f_p_hz,
        ip_over_ic=cfg.pump.ip_over_ic,
        p_range=(c.p_start, c.p_stop),
        p_step=c.p_step,
        f_range=_frequencies(cfg),
        ic=cfg.initial_conditions(),
        settings=cfg.integrator_settings(),
        tol_db=c.tol_db,
        guard_hz=cfg.spectrum.guard_ghz * 1e9,
        workers=workers,
    )
    write_csv(out / "compression.csv", ["p_in_dbm", "max_gain_db"], res.search_trace)
    summary = {
        "p1db_in_dbm": res.p1db_in_dbm,
        "g_small_signal_db": res.g_small_signal_db,
        "x0": cfg.geometry.x0,
        "pump_dbm": _pump_dbm(cfg),
    }
    with open(out / "compression.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"files": ["compression.csv", "compression.json"], "grid_shape": [len(res.search_trace)], **summary}


def _pump_dbm(cfg: RunConfig) -> float:
    return current_to_dbm(cfg.pump.ip_over_ic * cfg.device.I_c * 1e-6, cfg.device.Z0)


def cmd_trends(cfg: RunConfig, out: Path, workers: int) -> dict:
    x0 = cfg.trends.x0.samples()
    t = analysis.trend_terms(np.round(x0, 12))
    keys = ["x0", "dk_L_term", "dk_NL_term", "beta_term"]
    write_csv(out / "trends.csv", keys, zip(*(t[k] for k in keys)))
    return {
        "files": ["trends.csv"],
        "grid_shape": [len(x0)],
        "argmax_dk_NL_x0": float(t["x0"][int(np.argmax(t["dk_NL_term"]))]),
    }


COMMANDS = {
    "dispersion": cmd_dispersion,
    "spectrum": cmd_spectrum,
    "njj-scan": cmd_njj_scan,
    "sweep": cmd_sweep,
    "compression": cmd_compression,
    "trends": cmd_trends,
}


def _error(code: int, kind: str, message: str, **extra) -> int:
    payload = {"error": kind, "message": message, "exit_code": code, **extra}
    sys.stderr.write(json.dumps(payload, sort_keys=True, default=str) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sando", description="Sando-cell JTWPA gain simulator")
    p.add_argument("--version", action="version", version=f"sando {__version__}")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("config", help="JSON config file, or '-' for stdin")
    p.add_argument("--output-dir", help=f"overrides output.dir and ${ENV_OUTPUT_DIR}")
    p.add_argument("--workers", type=int, help=f"overrides workers and ${ENV_WORKERS}")
    return p


def run(command: str, cfg: RunConfig, output_dir: Path, workers: int) -> dict:
    output_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    info = COMMANDS[command](cfg, output_dir, workers)
    manifest = {
        "command": command,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": cfg.model_dump(mode="json"),
        "workers": workers,
        "wall_time_s": time.perf_counter() - t0,
        **info,
    }
    with open(output_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return manifest


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        return _error(EXIT_CONFIG, "ConfigError", str(exc), key="<file>")
    try:
        cfg = parse_config(text)
        workers = args.workers
        if workers is None and os.environ.get(ENV_WORKERS):
            try:
                workers = int(os.environ[ENV_WORKERS])
            except ValueError:
                raise ConfigError(ENV_WORKERS, "must be an integer") from None
        workers = cfg.workers if workers is None else workers
        if workers < 1:
            raise ConfigError("workers", "must be >= 1")
    except ConfigError as exc:
        return _error(EXIT_CONFIG, "ConfigError", str(exc), key=exc.key, constraint=exc.constraint)
    out = Path(args.output_dir or os.environ.get(ENV_OUTPUT_DIR) or cfg.output.dir)
    try:
        manifest = run(args.command, cfg, out, workers)
    except BracketNotFoundError as exc:
        return _error(EXIT_BRACKET, "BracketNotFoundError", str(exc), trace=exc.trace)
    except NumericalFailure as exc:
        return _error(EXIT_NUMERICAL, type(exc).__name__, str(exc), x=exc.x)
    except ConfigError as exc:
        return _error(EXIT_CONFIG, "ConfigError", str(exc), key=exc.key, constraint=exc.constraint)
    except InvalidParameterError as exc:
        return _error(EXIT_CONFIG, "InvalidParameterError", str(exc))
    except SandoError as exc:
        # invalid physics inputs (e.g. a signal above cutoff in njj-scan)
        return _error(EXIT_NUMERICAL, type(exc).__name__, str(exc))
    print(json.dumps({"ok": True, "output_dir": str(out), "files": manifest["files"]}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
