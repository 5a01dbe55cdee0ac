"""Physical <-> dimensionless conversions.

Internally everything is dimensionless: capacitances are ratios to C_J,
inductances ratios to L_J, angular frequencies are normalized by the
plasma frequency omega_J = (L_J C_J)^(-1/2) and positions are counted in
unit cells.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from sando.errors import InvalidParameterError

PHI0 = 2.067833848e-15  # Wb
MILLIWATT = 1e-3

SANDO = "sando"
SINGLE = "single"
_JUNCTIONS_PER_CELL = {SANDO: 3, SINGLE: 1}


class AmplitudeConvention(str, enum.Enum):
    """Map from a normalized drive current I/I_c to the flux amplitude xi.

    UNIT_CELL: xi = (I/I_c) / k
    CENTRAL_JUNCTION: xi = (I/I_c) / (x0 k)
    RMS_JUNCTION: xi = (I/I_c) / (k * sqrt(heart / n)), where heart is the
        sum of squared sub-cell fractions and n the junction count per cell,
        i.e. the current is set by the RMS phase drop over the cell's
        junctions. Equals CENTRAL_JUNCTION at equal spacing and UNIT_CELL
        for a single-junction cell.
    """

    UNIT_CELL = "unit_cell"
    CENTRAL_JUNCTION = "central_junction"
    RMS_JUNCTION = "rms_junction"


DEFAULT_CONVENTION = AmplitudeConvention.RMS_JUNCTION


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class ResonatorParams:
    C_c: float  # F
    C_r: float  # F
    L_r: float  # H

    def __post_init__(self):
        for name in ("C_c", "C_r", "L_r"):
            _positive(name, getattr(self, name))


@dataclass(frozen=True)
class PhysicalDeviceParams:
    """Fabrication-level description of the line.

    ``cell`` selects the three-junction Sando cell (``"sando"``) or the
    single-junction comparison cell (``"single"``, no outer sub-cells).
    """

    I_c: float
    C_J: float
    C_G0: float
    C_G1: float
    N_JJ: int
    Z0: float = 50.0
    resonator: Optional[ResonatorParams] = None
    cell: str = SANDO

    def __post_init__(self):
        for name in ("I_c", "C_J", "C_G0", "Z0"):
            _positive(name, getattr(self, name))
        if not (math.isfinite(self.C_G1) and self.C_G1 >= 0):
            raise InvalidParameterError(f"C_G1 must be >= 0, got {self.C_G1!r}")
        if self.cell not in _JUNCTIONS_PER_CELL:
            raise InvalidParameterError(f"cell must be 'sando' or 'single', got {self.cell!r}")
        if isinstance(self.N_JJ, bool) or not isinstance(self.N_JJ, int) or self.N_JJ < 0:
            raise InvalidParameterError(f"N_JJ must be a non-negative integer, got {self.N_JJ!r}")
        if self.cell == SANDO and self.N_JJ % 3:
            raise InvalidParameterError(f"N_JJ={self.N_JJ} is not divisible by 3 (Sando cell)")
        if self.cell == SINGLE and self.C_G1 != 0:
            raise InvalidParameterError("single-junction cells have no outer ground capacitance (C_G1 = 0)")

    @property
    def L_J(self) -> float:
        return PHI0 / (2 * math.pi * self.I_c)


@dataclass(frozen=True)
class Geometry:
    """Sub-unit-cell geometry fixed by the central fraction ``x0``."""

    x0: float
    x1: float = field(init=False)
    a: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.x0) and 0 < self.x0 <= 1):
            raise InvalidParameterError(f"x0 must lie in (0, 1], got {self.x0!r}")
        object.__setattr__(self, "x1", (1.0 - self.x0) / 2.0)
        object.__setattr__(self, "a", (1.0 + self.x0) / 4.0)

    @property
    def heart(self) -> float:
        return self.x0 ** 2 + 2.0 * self.x1 ** 2


@dataclass(frozen=True)
class ResonatorNorm:
    c_c: float
    c_r: float
    l_r: float


@dataclass(frozen=True)
class NormalizedModel:
    c_G0: float
    c_G1: float
    geometry: Geometry
    omega_J: float  # rad/s
    E_J: float  # J
    n_jj: int
    resonator_norm: Optional[ResonatorNorm] = None
    cell: str = SANDO
    I_c: float = 5e-6
    Z0: float = 50.0

    @property
    def junctions_per_cell(self) -> int:
        return _JUNCTIONS_PER_CELL[self.cell]

    @property
    def length(self) -> float:
        """Device length in unit cells."""
        return self.n_jj / self.junctions_per_cell

    def with_x0(self, x0: float) -> "NormalizedModel":
        if self.cell == SINGLE and x0 != 1:
            raise InvalidParameterError("single-junction cells require x0 = 1")
        return replace(self, geometry=Geometry(x0))

    def with_n_jj(self, n_jj: int) -> "NormalizedModel":
        if n_jj < 0 or (self.cell == SANDO and n_jj % 3):
            raise InvalidParameterError(f"invalid junction count {n_jj!r}")
        return replace(self, n_jj=n_jj)


def normalize(params: PhysicalDeviceParams, x0: float) -> NormalizedModel:
    """Build the dimensionless model of ``params`` at sub-unit-cell size ``x0``."""
    geometry = Geometry(x0)
    if params.cell == SINGLE and x0 != 1:
        raise InvalidParameterError("single-junction cells require x0 = 1")
    L_J = params.L_J
    omega_J = 1.0 / math.sqrt(L_J * params.C_J)
    res = None
    if params.resonator is not None:
        r = params.resonator
        res = ResonatorNorm(c_c=r.C_c / params.C_J, c_r=r.C_r / params.C_J, l_r=r.L_r / L_J)
    return NormalizedModel(
        c_G0=params.C_G0 / params.C_J,
        c_G1=params.C_G1 / params.C_J,
        geometry=geometry,
        omega_J=omega_J,
        E_J=params.I_c * PHI0 / (2 * math.pi),
        n_jj=params.N_JJ,
        resonator_norm=res,
        cell=params.cell,
        I_c=params.I_c,
        Z0=params.Z0,
    )


def freq_to_normalized(f: float, model: NormalizedModel) -> float:
    if not f > 0:
        raise InvalidParameterError(f"frequency must be positive, got {f!r}")
    return 2 * math.pi * f / model.omega_J


def normalized_to_freq(omega: float, model: NormalizedModel) -> float:
    return omega * model.omega_J / (2 * math.pi)


def current_to_amplitude(
    i_over_ic: float,
    k: float,
    convention: AmplitudeConvention = DEFAULT_CONVENTION,
    geometry: Optional[Geometry] = None,
    junctions_per_cell: int = 3,
) -> float:
    if k == 0:
        raise ZeroDivisionError("wavenumber k = 0 has no finite amplitude")
    if not k > 0 or i_over_ic < 0:
        raise InvalidParameterError(f"need k > 0 and I/I_c >= 0, got k={k!r}, I/I_c={i_over_ic!r}")
    convention = AmplitudeConvention(convention)
    if convention is AmplitudeConvention.UNIT_CELL:
        return i_over_ic / k
    if geometry is None:
        raise InvalidParameterError(f"convention {convention.value} needs the cell geometry")
    if convention is AmplitudeConvention.CENTRAL_JUNCTION:
        return i_over_ic / (geometry.x0 * k)
    heart = geometry.x0 ** 2 if junctions_per_cell == 1 else geometry.heart
    return i_over_ic / (k * math.sqrt(heart / junctions_per_cell))


def current_to_dbm(current: float, Z0: float = 50.0) -> float:
    """Power of a current ``current`` (A) into ``Z0``, as P = I^2 Z0, in dBm."""
    if not current > 0:
        raise InvalidParameterError(f"current must be positive, got {current!r}")
    return 10.0 * math.log10(current ** 2 * Z0 / MILLIWATT)


def dbm_to_current(p_dbm: float, Z0: float = 50.0) -> float:
    return math.sqrt(MILLIWATT * 10.0 ** (p_dbm / 10.0) / Z0)


def table1_params(**overrides) -> PhysicalDeviceParams:
    """Reference device: 1998 junctions, I_c = 5 uA, C_J = 200 fF, C_G = 26.3 fF."""
    values = dict(I_c=5e-6, C_J=200e-15, C_G0=26.3e-15, C_G1=26.3e-15, N_JJ=1998)
    values.update(overrides)
    return PhysicalDeviceParams(**values)


def rpm_params(**overrides) -> PhysicalDeviceParams:
    """Resonator-loaded reference device (f_r ~ 10.2 GHz)."""
    values = dict(
        I_c=5e-6,
        C_J=200e-15,
        C_G0=6.33e-15,
        C_G1=26.3e-15,
        N_JJ=1998,
        resonator=ResonatorParams(C_c=20e-15, C_r=6e-12, L_r=40.6e-12),
    )
    values.update(overrides)
    return PhysicalDeviceParams(**values)


def single_junction_params(**overrides) -> PhysicalDeviceParams:
    """Conventional one-junction cell with the same total ground capacitance per junction."""
    values = dict(I_c=5e-6, C_J=200e-15, C_G0=26.3e-15, C_G1=0.0, N_JJ=1998, cell=SINGLE)
    values.update(overrides)
    return PhysicalDeviceParams(**values)
