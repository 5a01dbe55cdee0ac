"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
collected in the terminal summary.
"""

import dataclasses
import math

import numpy as np
import sympy as sp

from conftest import ACCEPTANCE_LINES
from sando import analysis as A
from sando.cme import InitialConditions, conserved_quantities, integrate
from sando.dispersion import mode_triple, wavenumber
from sando.strongpump import StrongPumpSolution, gain_db
from sando.units import (
    DEFAULT_CONVENTION,
    AmplitudeConvention,
    current_to_dbm,
    normalize,
    rpm_params,
    single_junction_params,
    table1_params,
)
from test_single_junction import REDUCE, classic_system, sando_system

WORKERS = 4
F_P = 10e9
X0_SET = (1 / 5, 1 / 3, 1 / 2, 3 / 4)


def report(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def full_grid(f_p=F_P):
    f = A.guarded(A.frequency_grid(1e9, 19e9), f_p)
    return f[f < 2 * f_p]


def x0_grid(start=0.05, stop=1.0, step=A.X0_STEP):
    return np.round(np.arange(start, stop + step / 2, step), 10)


def test_criterion_01_pump_power():
    p = current_to_dbm(2.5e-6, 50.0)
    ok = abs(p - (-65.05)) <= 0.01
    report(1, ok, f"current_to_dbm(2.5 uA, 50 ohm) = {p:.4f} dBm (target -65.05 +/- 0.01)")
    assert ok


def test_criterion_02_engine_agreement():
    worst = {}
    for x0 in X0_SET:
        m = normalize(table1_params(), x0)
        a = A.gain_spectrum(full_grid(), F_P, m, engine=A.ANALYTIC)
        o = A.gain_spectrum(full_grid(), F_P, m, engine=A.ODE, workers=WORKERS)
        assert np.all(a.flags == o.flags) and np.all(a.flags == "")
        worst[x0] = float(np.max(np.abs(a.gain_db - o.gain_db)))
    ok = max(worst.values()) < 0.5
    detail = ", ".join(f"x0={x:.3g}: {d:.4f} dB" for x, d in worst.items())
    report(2, ok, f"max |analytic - ODE| over 1-19 GHz: {detail} (limit 0.5 dB)")
    assert ok


def test_criterion_03_geometry_optimum():
    x0, peak = A.max_gain_vs_x0(x0_grid(), normalize(table1_params(), 0.5), f_p=F_P, workers=WORKERS)
    interior = slice(1, -1)
    mins, maxs = A.local_extrema(peak)
    x_min = [float(x0[i]) for i in mins]
    i_max = max(maxs, key=lambda i: peak[i])
    # the global interior maximum must also beat every other interior point
    is_global = peak[i_max] >= np.max(peak[interior])
    ok = len(x_min) == 1 and abs(x_min[0] - 1 / 3) <= 0.01 and abs(x0[i_max] - 0.75) <= 0.03 and is_global
    report(
        3,
        ok,
        f"interior minima at x0={[round(v, 3) for v in x_min]} (target 1/3 +/- 0.01), "
        f"global interior max at x0={x0[i_max]:.3f} with {peak[i_max]:.2f} dB (target 0.75 +/- 0.03)",
    )
    assert ok


def _ratio(f_p, convention):
    ic = InitialConditions(convention=convention)
    g = {}
    for x0 in (0.75, 1 / 3):
        m = normalize(table1_params(), x0)
        g[x0] = A.gain_spectrum(full_grid(f_p), f_p, m, ic=ic).max_gain()[0]
    return g[0.75] / g[1 / 3]


def test_criterion_04_gain_ratio_and_convention_sensitivity():
    targets = {5e9: 2.07, 10e9: 1.58}
    table = {c: {f: _ratio(f, c) for f in targets} for c in AmplitudeConvention}
    for c, row in table.items():
        ACCEPTANCE_LINES.append(
            f"    convention {c.value:>16}: ratio(5 GHz) = {row[5e9]:.3f}, ratio(10 GHz) = {row[10e9]:.3f}"
        )
    shipped = table[DEFAULT_CONVENTION]
    ok = all(abs(shipped[f] - t) <= 0.15 for f, t in targets.items())
    matching = [c.value for c, row in table.items() if all(abs(row[f] - t) <= 0.15 for f, t in targets.items())]
    report(
        4,
        ok,
        f"shipped {DEFAULT_CONVENTION.value}: {shipped[5e9]:.3f} @5 GHz (2.07 +/- 0.15), "
        f"{shipped[10e9]:.3f} @10 GHz (1.58 +/- 0.15); conventions matching both: {matching}",
    )
    assert ok
    assert matching == [DEFAULT_CONVENTION.value]


def test_criterion_05_compression_points():
    p = {}
    for x0 in (0.75, 1 / 3):
        res = A.compression_point(normalize(table1_params(), x0), f_p=F_P, workers=WORKERS)
        p[x0] = res.p1db_in_dbm
    abs_ok = {x0: abs(p[x0] - t) <= 1.5 for x0, t in ((0.75, -96.6), (1 / 3, -84.6))}
    diff = p[1 / 3] - p[0.75]
    diff_ok = abs(diff - 12.0) <= 2.0
    # absolute values bind only if both land; otherwise the difference is the criterion
    ok = all(abs_ok.values()) or diff_ok
    report(
        5,
        ok,
        f"p1db(3/4) = {p[0.75]:.2f} dBm [{'in' if abs_ok[0.75] else 'OUT of'} -96.6 +/- 1.5], "
        f"p1db(1/3) = {p[1 / 3]:.2f} dBm [{'in' if abs_ok[1 / 3] else 'OUT of'} -84.6 +/- 1.5], "
        f"difference {diff:.2f} dB (binding: 12.0 +/- 2)",
    )
    assert ok
    assert p[0.75] < p[1 / 3]


def test_criterion_06_resonant_phase_matching():
    model = normalize(rpm_params(), 0.5)
    x0, peak = A.max_gain_vs_x0(x0_grid(), model, f_p=F_P, workers=WORKERS)
    best = float(x0[int(np.nanargmax(peak))])
    spec = A.gain_spectrum(A.frequency_grid(1e9, 19e9), F_P, model.with_x0(best))
    g_max = spec.max_gain()[0]
    bw = A.bandwidth_above(spec, 20.0)
    within = lambda v: v > 0 and 1 / 1.5 <= v / 4.0 <= 1.5
    ok = g_max > 29.0 and (within(bw.largest_contiguous_ghz) or within(bw.total_ghz))
    report(
        6,
        ok,
        f"optimal x0 = {best:.3f}: max gain {g_max:.2f} dB (> 29), above 20 dB: total {bw.total_ghz:.2f} GHz, "
        f"largest contiguous {bw.largest_contiguous_ghz:.2f} GHz (target 4 GHz within x1.5)",
    )
    assert ok


def _trajectories():
    for x0 in X0_SET:
        m = normalize(table1_params(), x0)
        for f_s in (2e9, 6e9, 9e9, 10.05e9, 14e9, 18e9):
            yield f"table1 x0={x0:.3g} f_s={f_s / 1e9:g}", mode_triple(f_s, F_P, m), m
    m = normalize(table1_params(), 0.75)
    yield "table1 x0=0.75 f_s=10.05 over 200k JJ", mode_triple(10.05e9, F_P, m), m.with_n_jj(199998)
    m = normalize(rpm_params(), 0.75)
    for f_s in (5e9, 8e9, 9.5e9, 12e9):
        yield f"rpm x0=0.75 f_s={f_s / 1e9:g}", mode_triple(f_s, F_P, m), m


def test_criterion_07_conserved_quantities():
    worst, where = 0.0, ""
    for label, triple, model in _trajectories():
        traj = integrate(triple, model)
        for c in conserved_quantities(traj):
            drift = float(np.max(np.abs(c - c[0])) / abs(c[0]))
            if drift > worst:
                worst, where = drift, label
    ok = worst < 1e-8
    report(7, ok, f"worst relative drift {worst:.2e} ({where}); limit 1e-8")
    assert ok


def test_criterion_08_zero_detuning_continuity():
    worst = 0.0
    for dk in np.linspace(-0.05, 0.05, 10):
        for x in np.linspace(0.0, 2000.0, 10):
            limit = 10 * math.log10(1 + (dk * x / 2) ** 2)
            for g2 in (1e-18, -1e-18):
                sol = dataclasses.replace(StrongPumpSolution.from_couplings(0.0, 0.0, float(dk)), g2=g2, g_abs=1e-9)
                worst = max(worst, abs(gain_db(sol, float(x)) - limit))
    ok = worst < 1e-9
    report(8, ok, f"max |G(|g|=1e-9) - limit| over 100-point grid, both branches: {worst:.2e} dB (limit 1e-9)")
    assert ok


def test_criterion_09_single_junction_reduction():
    m = normalize(single_junction_params(), 1.0)
    worst = 0.0
    for w in np.linspace(0.005, 0.99, 200):
        ref = w * math.sqrt(m.c_G0) / math.sqrt(1 - w * w)
        worst = max(worst, abs(wavenumber(w, m) - ref) / ref)
    sando, classic = sando_system(), classic_system()
    terms_equal = [sp.simplify(sp.expand(s.subs(REDUCE) - c)) == 0 for s, c in zip(sando, classic)]
    ok = worst <= 1e-14 and all(terms_equal)
    report(9, ok, f"k(w) max rel. error {worst:.1e} (limit 1e-14); symbolic term match {terms_equal}")
    assert ok


def test_criterion_10_junction_count_scan():
    model = normalize(table1_params(), 0.75)
    spec = A.gain_spectrum(A.frequency_grid(1e9, 19e9), F_P, model)
    f_peak = spec.max_gain()[1]
    scan = A.njj_scan(f_peak, F_P, model, n_max=200_000)
    n, g = scan.first_max
    ok = abs(n - 40000) <= 4000 and abs(g - 40.0) <= 2.0
    report(
        10,
        ok,
        f"x0=0.75, f_s={f_peak / 1e9:.2f} GHz (spectrum peak): first maximum {g:.2f} dB at N_JJ={n:.0f} "
        f"(target ~40 dB at 40000 +/- 10%); pump deviation {scan.pump_deviation:.1e}",
    )
    assert ok
