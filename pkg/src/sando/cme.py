"""Three-mode coupled amplitude/phase equations and their integration.

The state is (xi_p, xi_s, xi_i, Theta) with real amplitudes and the total
phase Theta = dk_L x + 2 theta_p - theta_s - theta_i. Position is measured
in unit cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from sando import _dopri
from sando.cell import ScalingFactors, linear_factors, nonlinear_factor
from sando.dispersion import ModeTriple
from sando.errors import InvalidParameterError, NumericalFailure, StiffnessError
from sando.units import DEFAULT_CONVENTION, AmplitudeConvention, Geometry, NormalizedModel, current_to_amplitude

SEED_FLOOR = 1e-16


@dataclass(frozen=True)
class FieldState:
    xi_p: float
    xi_s: float
    xi_i: float
    theta_big: float

    def as_array(self) -> np.ndarray:
        return np.array([self.xi_p, self.xi_s, self.xi_i, self.theta_big], dtype=float)

    @classmethod
    def from_array(cls, y) -> "FieldState":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))


@dataclass(frozen=True)
class MixingFactors:
    """Cell factors entering the equations for one triple."""

    club_p: float
    club_s: float
    club_i: float
    diamond_dk: float
    diamond_self: float

    @classmethod
    def for_triple(cls, triple: ModeTriple, geometry: Geometry) -> "MixingFactors":
        return cls(
            club_p=triple.club_p,
            club_s=triple.club_s,
            club_i=triple.club_i,
            diamond_dk=nonlinear_factor(geometry, triple.delta_k_L).value,
            diamond_self=nonlinear_factor(geometry, 0.0).value,
        )


@dataclass(frozen=True)
class InitialConditions:
    ip_over_ic: float = 0.5
    is_over_ip: float = 1e-5
    ii_over_ip: float = 1e-8
    theta_p: float = 0.0
    theta_s: float = 0.0
    theta_i: float = 0.0
    convention: AmplitudeConvention = DEFAULT_CONVENTION

    def __post_init__(self):
        if not self.ip_over_ic > 0:
            raise InvalidParameterError(f"I_p/I_c must be positive, got {self.ip_over_ic!r}")
        if self.is_over_ip < 0 or self.ii_over_ip < 0:
            raise InvalidParameterError("seed currents must be non-negative")
        object.__setattr__(self, "convention", AmplitudeConvention(self.convention))


@dataclass(frozen=True)
class IntegratorSettings:
    rtol: float = 1e-10
    atol: float = 1e-14
    max_step: float = 0.5
    max_steps: int = 50_000_000


DEFAULT_SETTINGS = IntegratorSettings()


@dataclass(frozen=True)
class Trajectory:
    x: np.ndarray
    states: np.ndarray  # (n, 4): xi_p, xi_s, xi_i, Theta
    triple: ModeTriple
    geometry: Geometry
    factors: ScalingFactors
    mixing: MixingFactors
    ic: InitialConditions
    junctions_per_cell: int = 3
    n_steps: int = 0

    @property
    def xi_p(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def xi_s(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def xi_i(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def theta(self) -> np.ndarray:
        return self.states[:, 3]

    @property
    def n_jj(self) -> np.ndarray:
        return self.x * self.junctions_per_cell

    def state_at(self, index: int) -> FieldState:
        return FieldState.from_array(self.states[index])


def coefficient_vector(triple: ModeTriple, mixing: MixingFactors) -> np.ndarray:
    c = np.empty(_dopri.N_COEFF)
    c[_dopri.WP], c[_dopri.WS], c[_dopri.WI] = triple.omega_p, triple.omega_s, triple.omega_i
    c[_dopri.KP], c[_dopri.KS], c[_dopri.KI] = triple.k_p, triple.k_s, triple.k_i
    c[_dopri.CLUB_P], c[_dopri.CLUB_S], c[_dopri.CLUB_I] = mixing.club_p, mixing.club_s, mixing.club_i
    c[_dopri.D_DK] = mixing.diamond_dk
    c[_dopri.D_SELF] = mixing.diamond_self
    c[_dopri.DK_L] = triple.delta_k_L
    return c


def rhs(state: FieldState, triple: ModeTriple, mixing: MixingFactors, x: Optional[float] = None) -> FieldState:
    """d(state)/dx. Returned as a FieldState of derivatives."""
    y = state.as_array()
    if not (y[0] > 0 and y[1] > 0 and y[2] > 0):
        raise InvalidParameterError(f"amplitudes must be positive, got {y[:3]!r}")
    out = np.empty(4)
    _dopri.rhs_kernel(y, coefficient_vector(triple, mixing), out)
    if not np.all(np.isfinite(out)):
        raise NumericalFailure("non-finite derivative", x)
    return FieldState.from_array(out)


def initial_state(triple: ModeTriple, model: NormalizedModel, ic: InitialConditions) -> FieldState:
    geom, n = model.geometry, model.junctions_per_cell
    conv = ic.convention
    xi_p = current_to_amplitude(ic.ip_over_ic, triple.k_p, conv, geom, n)
    xi_s = current_to_amplitude(ic.ip_over_ic * ic.is_over_ip, triple.k_s, conv, geom, n)
    xi_i = current_to_amplitude(ic.ip_over_ic * ic.ii_over_ip, triple.k_i, conv, geom, n)
    floor = SEED_FLOOR * xi_p
    theta = 2.0 * ic.theta_p - ic.theta_s - ic.theta_i
    return FieldState(xi_p, max(xi_s, floor), max(xi_i, floor), theta)


def sample_grid(length: float, stride: float = 1.0) -> np.ndarray:
    if stride <= 0:
        raise InvalidParameterError(f"stride must be positive, got {stride!r}")
    n = int(math.floor(length / stride + 1e-9))
    xs = np.arange(n + 1, dtype=float) * stride
    if xs[-1] < length - 1e-9 * max(1.0, length):
        xs = np.append(xs, length)
    else:
        xs[-1] = length if n else xs[-1]
    return xs


def integrate(
    triple: ModeTriple,
    model: NormalizedModel,
    ic: InitialConditions = InitialConditions(),
    length: Optional[float] = None,
    stride: float = 1.0,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    x_samples: Optional[np.ndarray] = None,
) -> Trajectory:
    """Integrate the coupled-mode system over ``length`` unit cells.

    ``length`` defaults to the device length of ``model``. Samples are taken
    every ``stride`` cells plus the end point, or at ``x_samples`` if given.
    """
    if length is None:
        length = model.length
    if length < 0:
        raise InvalidParameterError(f"length must be >= 0, got {length!r}")
    y0 = initial_state(triple, model, ic)
    mixing = MixingFactors.for_triple(triple, model.geometry)
    if x_samples is None:
        xs = sample_grid(length, stride) if length > 0 else np.zeros(1)
    else:
        xs = np.asarray(x_samples, dtype=float)
        if xs[0] != 0 or np.any(np.diff(xs) <= 0):
            raise InvalidParameterError("x_samples must start at 0 and increase strictly")
    samples, status, x_last, steps = _dopri.integrate_kernel(
        coefficient_vector(triple, mixing),
        y0.as_array(),
        xs,
        settings.rtol,
        settings.atol,
        settings.max_step,
        settings.max_steps,
    )
    if status == _dopri.STATUS_STIFF:
        raise StiffnessError("step size underflow", x_last)
    if status == _dopri.STATUS_NONFINITE:
        raise NumericalFailure("non-finite state", x_last)
    if status == _dopri.STATUS_NONPOSITIVE:
        raise NumericalFailure("amplitude reached zero", x_last)
    if status == _dopri.STATUS_MAX_STEPS:
        raise StiffnessError(f"exceeded {settings.max_steps} steps", x_last)
    return Trajectory(
        x=xs,
        states=samples,
        triple=triple,
        geometry=model.geometry,
        factors=linear_factors(model),
        mixing=mixing,
        ic=ic,
        junctions_per_cell=model.junctions_per_cell,
        n_steps=int(steps),
    )


def gain_db_from_trajectory(traj: Trajectory) -> np.ndarray:
    xs = traj.xi_s
    if not xs[0] > 0:
        raise InvalidParameterError("initial signal amplitude must be positive")
    return 20.0 * np.log10(xs / xs[0])


def conserved_quantities(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """The two Manley-Rowe-type constants of motion along ``traj``.

    C1 = w_s^2 club_s xi_s^2 / (k_i - 2k_p) - w_i^2 club_i xi_i^2 / (k_s - 2k_p)
    C2 = w_p^2 club_p xi_p^2 / (2 (k_s + k_i - k_p)) - w_s^2 club_s xi_s^2 / (k_i - 2k_p)
    The club weights are constant without a resonator and cancel then.
    """
    pump, sig, idl = conserved_terms(traj)
    return sig - idl, pump - sig


def conserved_terms(traj: Trajectory) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t, m = traj.triple, traj.mixing
    sig = t.omega_s ** 2 * m.club_s * traj.xi_s ** 2 / (t.k_i - 2 * t.k_p)
    idl = t.omega_i ** 2 * m.club_i * traj.xi_i ** 2 / (t.k_s - 2 * t.k_p)
    pump = t.omega_p ** 2 * m.club_p * traj.xi_p ** 2 / (2 * (t.k_s + t.k_i - t.k_p))
    return pump, sig, idl
