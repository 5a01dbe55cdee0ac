"""Spectra, sweeps, junction-count scans, compression and bandwidth figures."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from sando.cell import linear_factors, nonlinear_factor
from sando.cme import (
    DEFAULT_SETTINGS,
    InitialConditions,
    IntegratorSettings,
    gain_db_from_trajectory,
    initial_state,
    integrate,
)
from sando.dispersion import DEGENERACY_GUARD_HZ, mode_triple
from sando.errors import (
    AboveCutoffError,
    BracketNotFoundError,
    DegenerateSignalError,
    InvalidParameterError,
    NumericalFailure,
    PoleError,
    StopbandError,
)
from sando.strongpump import gain_db, solve_strong_pump
from sando.units import Geometry, NormalizedModel, dbm_to_current

ANALYTIC = "analytic"
ODE = "ode"
ENGINES = (ANALYTIC, ODE)

FLAG_STOPBAND = "stopband"
FLAG_ABOVE_CUTOFF = "above_cutoff"
FLAG_DEGENERATE = "degenerate_guard"
FLAG_NUMERICAL = "numerical_failure"
FLAG_NO_IDLER = "idler_out_of_range"

CELL_FIELDS = ("gain_db", "k_s", "k_p", "k_i", "delta_k", "theta_final")

F_STEP_HZ = 50e6
X0_STEP = 0.005
IP_STEP = 0.005


def frequency_grid(start_hz: float, stop_hz: float, step_hz: float = F_STEP_HZ) -> np.ndarray:
    """Inclusive grid built from integer multiples so it is reproducible."""
    n = int(round((stop_hz - start_hz) / step_hz))
    return start_hz + step_hz * np.arange(n + 1)


def guarded(f_range: Iterable[float], f_p: float, guard_hz: float = DEGENERACY_GUARD_HZ) -> np.ndarray:
    f = np.asarray(list(f_range), dtype=float)
    return f[np.abs(f - f_p) >= guard_hz]


@dataclass
class SweepGrid:
    """Tabulated results on ``axis1`` (signal frequency, Hz) x optional ``axis2``.

    Every value array has shape (len(axis2) or 1, len(axis1)); flagged cells
    hold NaN and a non-empty entry in ``flags``.
    """

    axis1_name: str
    axis1: np.ndarray
    axis2_name: Optional[str]
    axis2: Optional[np.ndarray]
    values: dict
    flags: np.ndarray

    @classmethod
    def empty(cls, axis1_name, axis1, axis2_name=None, axis2=None) -> "SweepGrid":
        rows = 1 if axis2 is None else len(axis2)
        shape = (rows, len(axis1))
        return cls(
            axis1_name=axis1_name,
            axis1=np.asarray(axis1, dtype=float),
            axis2_name=axis2_name,
            axis2=None if axis2 is None else np.asarray(axis2, dtype=float),
            values={name: np.full(shape, np.nan) for name in CELL_FIELDS},
            flags=np.full(shape, "", dtype=object),
        )

    @property
    def shape(self) -> tuple:
        return self.flags.shape

    @property
    def gain_db(self) -> np.ndarray:
        return self.values["gain_db"]

    def row(self, j: int = 0) -> "SweepGrid":
        return SweepGrid(
            axis1_name=self.axis1_name,
            axis1=self.axis1,
            axis2_name=None,
            axis2=None,
            values={k: v[j : j + 1].copy() for k, v in self.values.items()},
            flags=self.flags[j : j + 1].copy(),
        )

    def max_gain(self, j: int = 0) -> tuple[float, float]:
        """(max gain dB, axis1 value at max) over unflagged cells of row ``j``."""
        g = self.values["gain_db"][j]
        ok = np.isfinite(g)
        if not ok.any():
            return math.nan, math.nan
        i = int(np.nanargmax(np.where(ok, g, -np.inf)))
        return float(g[i]), float(self.axis1[i])


def flag_for(exc: Exception) -> str:
    if isinstance(exc, (StopbandError, PoleError)):
        return FLAG_STOPBAND
    if isinstance(exc, AboveCutoffError):
        return FLAG_ABOVE_CUTOFF
    if isinstance(exc, DegenerateSignalError):
        return FLAG_DEGENERATE
    return FLAG_NUMERICAL


def evaluate_point(
    model: NormalizedModel,
    f_s: float,
    f_p: float,
    ic: InitialConditions = InitialConditions(),
    engine: str = ANALYTIC,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    guard_hz: float = DEGENERACY_GUARD_HZ,
    use_resonator: bool = True,
) -> tuple[dict, str]:
    """Gain and mode data at one (f_s, f_p). Returns (values, flag)."""
    if engine not in ENGINES:
        raise InvalidParameterError(f"unknown engine {engine!r}")
    if not 0 < f_s < 2 * f_p:
        # happens in pump-frequency sweeps; the idler would need a negative frequency
        return {}, FLAG_NO_IDLER
    try:
        triple = mode_triple(f_s, f_p, model, use_resonator, guard_hz)
    except (StopbandError, PoleError, AboveCutoffError, DegenerateSignalError) as exc:
        return {}, flag_for(exc)
    a_p = initial_state(triple, model, ic).xi_p
    sol = solve_strong_pump(triple, model, a_p)
    values = dict(k_s=triple.k_s, k_p=triple.k_p, k_i=triple.k_i, delta_k=sol.delta_k, theta_final=math.nan)
    length = model.length
    if engine == ANALYTIC:
        values["gain_db"] = gain_db(sol, length)
        return values, ""
    if length == 0:
        values["gain_db"] = 0.0
        values["theta_final"] = initial_state(triple, model, ic).theta_big
        return values, ""
    try:
        traj = integrate(triple, model, ic, length=length, stride=length, settings=settings)
    except NumericalFailure:
        return values, FLAG_NUMERICAL
    values["gain_db"] = float(gain_db_from_trajectory(traj)[-1])
    values["theta_final"] = float(traj.theta[-1])
    return values, ""


def _run_cells(jobs: Sequence[tuple], fn: Callable, workers: int):
    if workers <= 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def _fill(grid: SweepGrid, j: int, i: int, result):
    values, flag = result
    if flag:
        grid.flags[j, i] = flag
        return
    for name in CELL_FIELDS:
        grid.values[name][j, i] = values.get(name, math.nan)


def gain_spectrum(
    f_range: Iterable[float],
    f_p: float,
    model: NormalizedModel,
    engine: str = ANALYTIC,
    n_jj: Optional[int] = None,
    ic: InitialConditions = InitialConditions(),
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    guard_hz: float = DEGENERACY_GUARD_HZ,
    workers: int = 1,
) -> SweepGrid:
    if n_jj is not None:
        model = model.with_n_jj(n_jj)
    f = np.asarray(list(f_range), dtype=float)
    grid = SweepGrid.empty("f_s", f)
    jobs = [(model, fs, f_p, ic, engine, settings, guard_hz) for fs in f]
    for i, res in enumerate(_run_cells(jobs, evaluate_point, workers)):
        _fill(grid, 0, i, res)
    return grid


SWEEP_AXES = ("x0", "ip_over_ic", "f_p")


def sweep_2d(
    f_range: Iterable[float],
    axis2: str,
    values: Iterable[float],
    model: NormalizedModel,
    f_p: float = 10e9,
    engine: str = ANALYTIC,
    n_jj: Optional[int] = None,
    ic: InitialConditions = InitialConditions(),
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    guard_hz: float = DEGENERACY_GUARD_HZ,
    workers: int = 1,
) -> SweepGrid:
    """Gain grid over signal frequency and one of x0, I_p/I_c or f_p (Hz)."""
    if axis2 not in SWEEP_AXES:
        raise InvalidParameterError(f"axis2 must be one of {SWEEP_AXES}, got {axis2!r}")
    if n_jj is not None:
        model = model.with_n_jj(n_jj)
    f = np.asarray(list(f_range), dtype=float)
    v = np.asarray(list(values), dtype=float)
    if len(v) > 1 and not (np.all(np.diff(v) > 0) or np.all(np.diff(v) < 0)):
        raise InvalidParameterError("axis2 samples must be strictly monotone")
    grid = SweepGrid.empty("f_s", f, axis2, v)
    jobs, where = [], []
    for j, val in enumerate(v):
        m, p, fp = model, ic, f_p
        if axis2 == "x0":
            m = model.with_x0(float(val))
        elif axis2 == "ip_over_ic":
            p = InitialConditions(**{**ic.__dict__, "ip_over_ic": float(val)})
        else:
            fp = float(val)
        for i, fs in enumerate(f):
            jobs.append((m, fs, fp, p, engine, settings, guard_hz))
            where.append((j, i))
    for (j, i), res in zip(where, _run_cells(jobs, evaluate_point, workers)):
        _fill(grid, j, i, res)
    return grid


@dataclass
class NjjScan:
    n_jj: np.ndarray
    gain_db: np.ndarray
    signal_power: np.ndarray
    idler_power: np.ndarray
    pump_power: np.ndarray
    theta: np.ndarray
    f_s: float
    f_p: float
    first_max_index: Optional[int]

    @property
    def first_max(self) -> Optional[tuple[float, float]]:
        """(N_JJ, gain dB) at the first local maximum of the signal gain."""
        if self.first_max_index is None:
            return None
        i = self.first_max_index
        return float(self.n_jj[i]), float(self.gain_db[i])

    @property
    def pump_deviation(self) -> float:
        return float(np.max(np.abs(np.sqrt(self.pump_power) - 1.0)))


def first_local_max(y: np.ndarray) -> Optional[int]:
    d = np.diff(y)
    idx = np.nonzero((d[:-1] > 0) & (d[1:] <= 0))[0]
    return int(idx[0] + 1) if len(idx) else None


def njj_scan(
    f_s: float,
    f_p: float,
    model: NormalizedModel,
    n_max: int = 200_000,
    ic: InitialConditions = InitialConditions(),
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    stride: float = 1.0,
    guard_hz: float = DEGENERACY_GUARD_HZ,
) -> NjjScan:
    """Mode powers and phase versus junction count, sampled every ``stride`` cells.

    Powers are drive-current ratios squared, relative to the input pump.
    """
    if n_max > 200_000:
        raise InvalidParameterError(f"n_max={n_max} exceeds the 200000-junction scan range")
    n_cell = model.junctions_per_cell
    length = float(n_max // n_cell)
    triple = mode_triple(f_s, f_p, model, True, guard_hz)
    traj = integrate(triple, model, ic, length=length, stride=stride, settings=settings)
    t = traj.triple
    ref = t.k_p * traj.xi_p[0]
    gain = gain_db_from_trajectory(traj)
    return NjjScan(
        n_jj=traj.n_jj,
        gain_db=gain,
        signal_power=(t.k_s * traj.xi_s / ref) ** 2,
        idler_power=(t.k_i * traj.xi_i / ref) ** 2,
        pump_power=(t.k_p * traj.xi_p / ref) ** 2,
        theta=traj.theta,
        f_s=f_s,
        f_p=f_p,
        first_max_index=first_local_max(gain),
    )


@dataclass
class CompressionResult:
    p1db_in_dbm: float
    g_small_signal_db: float
    search_trace: list = field(default_factory=list)  # (P_in dBm, max gain dB)


def max_gain_over(grid: SweepGrid) -> float:
    return grid.max_gain(0)[0]


def compression_point(
    model: NormalizedModel,
    f_p: float = 10e9,
    ip_over_ic: float = 0.5,
    p_range: tuple[float, float] = (-130.0, -60.0),
    p_step: float = 2.0,
    f_range: Optional[Sequence[float]] = None,
    ic: InitialConditions = InitialConditions(),
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol_db: float = 0.02,
    guard_hz: float = DEGENERACY_GUARD_HZ,
    workers: int = 1,
) -> CompressionResult:
    """Input signal power (dBm) where the maximum ODE gain falls 1 dB below
    the strong-pump small-signal maximum.

    The maximum is taken over ``f_range`` (default 1-19 GHz in 50 MHz steps).
    """
    if f_range is None:
        f_range = frequency_grid(1e9, 19e9)
    f = guarded(f_range, f_p, guard_hz)
    i_p = ip_over_ic * model.I_c
    base = InitialConditions(**{**ic.__dict__, "ip_over_ic": ip_over_ic})
    g_ss = max_gain_over(gain_spectrum(f, f_p, model, ANALYTIC, ic=base, guard_hz=guard_hz, workers=workers))
    target = g_ss - 1.0
    trace = []

    def max_gain_at(p_dbm):
        ratio = dbm_to_current(p_dbm, model.Z0) / i_p
        p = InitialConditions(**{**base.__dict__, "is_over_ip": ratio})
        g = max_gain_over(gain_spectrum(f, f_p, model, ODE, ic=p, settings=settings, guard_hz=guard_hz, workers=workers))
        trace.append((float(p_dbm), float(g)))
        return g

    lo, hi = p_range
    n = int(round((hi - lo) / p_step))
    prev_p, prev_g = None, None
    bracket = None
    for step in range(n + 1):
        p = lo + step * p_step
        g = max_gain_at(p)
        if g <= target:
            if prev_p is None:
                raise BracketNotFoundError(f"gain at {p} dBm already below g_ss - 1 dB", trace)
            bracket = (prev_p, p)
            break
        prev_p, prev_g = p, g
    if bracket is None:
        raise BracketNotFoundError(f"no 1 dB drop within {p_range} dBm", trace)
    a, b = bracket
    mid = 0.5 * (a + b)
    for _ in range(60):
        mid = 0.5 * (a + b)
        g = max_gain_at(mid)
        if abs(g - target) <= tol_db:
            break
        if g > target:
            a = mid
        else:
            b = mid
        if b - a < 1e-6:
            break
    return CompressionResult(p1db_in_dbm=float(mid), g_small_signal_db=float(g_ss), search_trace=trace)


@dataclass
class Bandwidth:
    total_ghz: float
    largest_contiguous_ghz: float
    bands: list  # [(f_lo_ghz, f_hi_ghz)]


def bandwidth_above(spectrum: SweepGrid, threshold_db: float, row: int = 0, max_spacing_hz: float = F_STEP_HZ) -> Bandwidth:
    """Measure of the signal band where gain exceeds ``threshold_db``.

    Crossings are located by linear interpolation. Stopband, cutoff and
    failed cells terminate a band; degeneracy-guard cells are bridged.
    """
    f = np.asarray(spectrum.axis1, dtype=float)
    if f.size == 0:
        raise InvalidParameterError("empty spectrum")
    if f.size > 1 and np.max(np.diff(f)) > max_spacing_hz * (1 + 1e-9):
        raise InvalidParameterError(f"spectrum spacing exceeds {max_spacing_hz / 1e6:g} MHz")
    g = spectrum.values["gain_db"][row]
    flags = spectrum.flags[row]
    keep = flags != FLAG_DEGENERATE
    f, g, flags = f[keep], g[keep], flags[keep]
    bands = []
    start = None

    def close(end):
        nonlocal start
        if start is not None and end > start:
            bands.append((start / 1e9, end / 1e9))
        start = None

    for i in range(len(f)):
        valid = flags[i] == "" and np.isfinite(g[i])
        if not valid:
            # band ends at the last good sample before the flagged one
            if start is not None:
                close(f[i - 1])
            continue
        above = g[i] > threshold_db
        prev_valid = i > 0 and flags[i - 1] == "" and np.isfinite(g[i - 1])
        if above and start is None:
            if prev_valid and g[i - 1] <= threshold_db:
                t = (threshold_db - g[i - 1]) / (g[i] - g[i - 1])
                start = f[i - 1] + t * (f[i] - f[i - 1])
            else:
                start = f[i]
        elif not above and start is not None and prev_valid:
            t = (g[i - 1] - threshold_db) / (g[i - 1] - g[i])
            close(f[i - 1] + t * (f[i] - f[i - 1]))
    if start is not None:
        close(f[-1])
    widths = [hi - lo for lo, hi in bands]
    return Bandwidth(total_ghz=float(sum(widths)), largest_contiguous_ghz=float(max(widths, default=0.0)), bands=bands)


def trend_terms(x0_values: Iterable[float]) -> dict:
    """x0-dependence of the linear mismatch, nonlinear mismatch and coupling
    product at fixed frequencies and pump, each normalized to its maximum."""
    x0 = np.asarray(list(x0_values), dtype=float)
    heart = np.empty_like(x0)
    d_self = np.empty_like(x0)
    for n, v in enumerate(x0):
        geom = Geometry(float(v))
        heart[n] = geom.heart
        d_self[n] = nonlinear_factor(geom, 0.0).value
    dk_l = heart ** -0.5
    dk_nl = heart ** -2.5 * d_self
    beta = heart ** -5.0 * d_self ** 2
    return {
        "x0": x0,
        "dk_L_term": dk_l / dk_l.max(),
        "dk_NL_term": dk_nl / dk_nl.max(),
        "beta_term": beta / beta.max(),
    }


def local_extrema(y: np.ndarray) -> tuple[list, list]:
    """Indices of interior strict local minima and maxima."""
    mins, maxs = [], []
    for i in range(1, len(y) - 1):
        if y[i] < y[i - 1] and y[i] < y[i + 1]:
            mins.append(i)
        if y[i] > y[i - 1] and y[i] > y[i + 1]:
            maxs.append(i)
    return mins, maxs


def max_gain_vs_x0(
    x0_values: Iterable[float],
    model: NormalizedModel,
    f_p: float = 10e9,
    f_range: Optional[Sequence[float]] = None,
    engine: str = ANALYTIC,
    ic: InitialConditions = InitialConditions(),
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    if f_range is None:
        f_range = frequency_grid(1e9, 19e9)
    x0 = np.asarray(list(x0_values), dtype=float)
    grid = sweep_2d(guarded(f_range, f_p), "x0", x0, model, f_p=f_p, engine=engine, ic=ic, workers=workers)
    return x0, np.array([grid.max_gain(j)[0] for j in range(len(x0))])
