"""Simulation toolkit for three-junction (Sando) unit-cell Josephson
traveling-wave parametric amplifiers."""

from sando.units import (
    AmplitudeConvention,
    Geometry,
    NormalizedModel,
    PhysicalDeviceParams,
    ResonatorParams,
    current_to_amplitude,
    current_to_dbm,
    dbm_to_current,
    freq_to_normalized,
    normalize,
    table1_params,
)
from sando.cell import ScalingFactors, club_with_resonator, linear_factors, nonlinear_factor
from sando.dispersion import ModeTriple, mode_triple, wavenumber
from sando.strongpump import StrongPumpSolution, gain_db, signal_amplitude, solve_strong_pump
from sando.cme import FieldState, InitialConditions, Trajectory, gain_db_from_trajectory, integrate, rhs
from sando.analysis import SweepGrid, bandwidth_above, compression_point, gain_spectrum, njj_scan, sweep_2d, trend_terms

__version__ = "0.1.0"

__all__ = [
    "AmplitudeConvention",
    "FieldState",
    "InitialConditions",
    "SweepGrid",
    "bandwidth_above",
    "compression_point",
    "gain_spectrum",
    "njj_scan",
    "sweep_2d",
    "trend_terms",
    "Geometry",
    "ModeTriple",
    "NormalizedModel",
    "PhysicalDeviceParams",
    "ResonatorParams",
    "ScalingFactors",
    "StrongPumpSolution",
    "Trajectory",
    "club_with_resonator",
    "current_to_amplitude",
    "current_to_dbm",
    "dbm_to_current",
    "freq_to_normalized",
    "gain_db",
    "gain_db_from_trajectory",
    "integrate",
    "linear_factors",
    "mode_triple",
    "nonlinear_factor",
    "normalize",
    "rhs",
    "signal_amplitude",
    "solve_strong_pump",
    "table1_params",
    "wavenumber",
]
