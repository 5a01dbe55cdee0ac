"""Linear dispersion k(omega) and the pump/signal/idler triple."""

from __future__ import annotations

import math
from dataclasses import dataclass

from sando.cell import club_at, linear_factors
from sando.errors import AboveCutoffError, DegenerateSignalError, InvalidParameterError, SandoError, StopbandError
from sando.units import NormalizedModel, freq_to_normalized

DEGENERACY_GUARD_HZ = 1e6


@dataclass(frozen=True)
class ModeTriple:
    omega_p: float
    omega_s: float
    omega_i: float
    k_p: float
    k_s: float
    k_i: float
    delta_k_L: float
    club_p: float
    club_s: float
    club_i: float


def cutoff(model: NormalizedModel) -> float:
    f = linear_factors(model)
    return math.sqrt(f.diamond_L / f.heart)


def wavenumber(omega: float, model: NormalizedModel, use_resonator: bool = True) -> float:
    """Forward-branch wavenumber per unit cell; odd in ``omega``."""
    if omega == 0:
        return 0.0
    w = abs(omega)
    f = linear_factors(model)
    radicand = 1.0 - (f.heart / f.diamond_L) * w * w
    if not radicand > 0:
        raise AboveCutoffError(omega, cutoff(model))
    club = club_at(model, w, use_resonator)
    if club < 0:
        raise StopbandError(omega, club)
    k = w * math.sqrt(club / f.diamond_L) / math.sqrt(radicand)
    return math.copysign(k, omega)


def triple_from_omegas(
    omega_s: float, omega_p: float, model: NormalizedModel, use_resonator: bool = True
) -> ModeTriple:
    omega_i = 2.0 * omega_p - omega_s
    ks = {}
    for mode, w in (("pump", omega_p), ("signal", omega_s), ("idler", omega_i)):
        try:
            ks[mode] = wavenumber(w, model, use_resonator)
        except SandoError as exc:
            exc.mode = mode
            raise
    kp, k_s, ki = ks["pump"], ks["signal"], ks["idler"]
    return ModeTriple(
        omega_p=omega_p,
        omega_s=omega_s,
        omega_i=omega_i,
        k_p=kp,
        k_s=k_s,
        k_i=ki,
        delta_k_L=2.0 * kp - k_s - ki,
        club_p=club_at(model, omega_p, use_resonator),
        club_s=club_at(model, omega_s, use_resonator),
        club_i=club_at(model, omega_i, use_resonator),
    )


def mode_triple(
    f_s: float,
    f_p: float,
    model: NormalizedModel,
    use_resonator: bool = True,
    guard_hz: float = DEGENERACY_GUARD_HZ,
) -> ModeTriple:
    """Triple for signal ``f_s`` and pump ``f_p`` (Hz), idler at 2 f_p - f_s."""
    if not (0 < f_s < 2 * f_p):
        raise InvalidParameterError(f"need 0 < f_s < 2 f_p, got f_s={f_s!r}, f_p={f_p!r}")
    if abs(f_s - f_p) < guard_hz:
        raise DegenerateSignalError(f"|f_s - f_p| = {abs(f_s - f_p)!r} Hz is inside the {guard_hz!r} Hz guard")
    return triple_from_omegas(freq_to_normalized(f_s, model), freq_to_normalized(f_p, model), model, use_resonator)
