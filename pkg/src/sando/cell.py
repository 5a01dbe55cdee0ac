"""Scaling factors of the three-junction unit cell.

Symbols follow the suit names of the model: ``club`` is the total ground
capacitance per cell, ``heart`` and ``diamond_L`` the linear inductive and
capacitive geometry factors, ``diamond_NL`` the nonlinear one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from sando.errors import InvalidParameterError, PoleError
from sando.units import Geometry, NormalizedModel

POLE_GUARD = 1e-12


@dataclass(frozen=True)
class ScalingFactors:
    club: float
    heart: float
    diamond_L: float


@dataclass(frozen=True)
class NonlinearFactor:
    value: float
    mismatch: float


def linear_factors(model: NormalizedModel) -> ScalingFactors:
    """Frequency-independent factors of the bare (resonator-free) cell."""
    g = model.geometry
    heart = g.x0 ** 2 + 2.0 * g.x1 ** 2
    return ScalingFactors(club=model.c_G0 + 2.0 * model.c_G1, heart=heart, diamond_L=heart)


def resonator_capacitance(model: NormalizedModel, omega: float) -> float:
    """Effective normalized capacitance c_LC(omega) of the shunt LC resonator.

    Raises PoleError within POLE_GUARD of the denominator zero.
    """
    res = model.resonator_norm
    if res is None:
        raise InvalidParameterError("model has no resonator")
    w2 = omega * omega
    den = res.l_r * (res.c_c + res.c_r) * w2 - 1.0
    if abs(den) < POLE_GUARD:
        raise PoleError(omega)
    return res.c_c * (res.l_r * res.c_r * w2 - 1.0) / den


def club_with_resonator(model: NormalizedModel, omega: float) -> float:
    return model.c_G0 + resonator_capacitance(model, omega) + 2.0 * model.c_G1


def club_at(model: NormalizedModel, omega: float, use_resonator: bool = True) -> float:
    """``club`` at ``omega``, resonator-loaded when the model carries one."""
    if use_resonator and model.resonator_norm is not None:
        return club_with_resonator(model, omega)
    return model.c_G0 + 2.0 * model.c_G1


def resonator_pole(model: NormalizedModel) -> float:
    res = model.resonator_norm
    if res is None:
        raise InvalidParameterError("model has no resonator")
    return 1.0 / math.sqrt(res.l_r * (res.c_c + res.c_r))


def resonator_zero(model: NormalizedModel) -> float:
    res = model.resonator_norm
    if res is None:
        raise InvalidParameterError("model has no resonator")
    return 1.0 / math.sqrt(res.l_r * res.c_r)


def nonlinear_factor(geometry: Geometry, mismatch: float) -> NonlinearFactor:
    """x0^4 + 2 x1^4 cos(mismatch * a) for one mixing term."""
    value = geometry.x0 ** 4 + 2.0 * geometry.x1 ** 4 * math.cos(mismatch * geometry.a)
    return NonlinearFactor(value=value, mismatch=mismatch)
