"""Closed-form gain of the undepleted-pump (strong-pump) limit."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from sando.cell import nonlinear_factor
from sando.dispersion import ModeTriple
from sando.errors import InvalidParameterError
from sando.units import NormalizedModel

SMALL_GX = 1e-8
_LOG_SWITCH = 300.0


@dataclass(frozen=True)
class StrongPumpSolution:
    """Phase rotations ``alpha``, couplings ``beta`` and the gain coefficient.

    ``g2`` is signed: g2 < 0 means g = i*|g| (oscillating branch).
    """

    alpha_p: float
    alpha_s: float
    alpha_i: float
    beta_s: float
    beta_i: float
    delta_k: float
    delta_k_L: float
    g2: float
    g_abs: float
    a_p: float

    @property
    def imaginary(self) -> bool:
        return self.g2 < 0

    @property
    def delta_k_NL(self) -> float:
        return 2.0 * self.alpha_p - self.alpha_s - self.alpha_i

    @classmethod
    def from_couplings(cls, beta_s, beta_i, delta_k, **kw) -> "StrongPumpSolution":
        g2 = beta_s * beta_i - (delta_k / 2.0) ** 2
        fields = dict(alpha_p=0.0, alpha_s=0.0, alpha_i=0.0, delta_k_L=delta_k, a_p=0.0)
        fields.update(kw)
        return cls(beta_s=beta_s, beta_i=beta_i, delta_k=delta_k, g2=g2, g_abs=math.sqrt(abs(g2)), **fields)


def solve_strong_pump(triple: ModeTriple, model: NormalizedModel, a_p: float) -> StrongPumpSolution:
    if a_p < 0:
        raise InvalidParameterError(f"pump amplitude must be >= 0, got {a_p!r}")
    t = triple
    geom = model.geometry
    d_self = nonlinear_factor(geom, 0.0).value
    d_dk = nonlinear_factor(geom, t.delta_k_L).value
    a2 = a_p * a_p
    kp, ks, ki = t.k_p, t.k_s, t.k_i
    alpha_p = kp ** 5 * d_self * a2 / (16.0 * t.omega_p ** 2 * t.club_p)
    alpha_s = ks ** 3 * kp ** 2 * d_self * a2 / (8.0 * t.omega_s ** 2 * t.club_s)
    alpha_i = ki ** 3 * kp ** 2 * d_self * a2 / (8.0 * t.omega_i ** 2 * t.club_i)
    common = kp ** 2 * ki * ks * d_dk * a2
    beta_s = common * (2.0 * kp - ki) / (16.0 * t.omega_s ** 2 * t.club_s)
    beta_i = common * (2.0 * kp - ks) / (16.0 * t.omega_i ** 2 * t.club_i)
    delta_k = t.delta_k_L + 2.0 * alpha_p - alpha_s - alpha_i
    g2 = beta_s * beta_i - (delta_k / 2.0) ** 2
    return StrongPumpSolution(
        alpha_p=alpha_p,
        alpha_s=alpha_s,
        alpha_i=alpha_i,
        beta_s=beta_s,
        beta_i=beta_i,
        delta_k=delta_k,
        delta_k_L=t.delta_k_L,
        g2=g2,
        g_abs=math.sqrt(abs(g2)),
        a_p=a_p,
    )


def _c_and_s(sol: StrongPumpSolution, x: float):
    """cosh(gx) and sinh(gx)/g on whichever branch applies."""
    gx = sol.g_abs * x
    if gx < SMALL_GX:
        return 1.0, x
    if sol.imaginary:
        return math.cos(gx), math.sin(gx) / sol.g_abs
    return math.cosh(gx), math.sinh(gx) / sol.g_abs


def gain_db(sol: StrongPumpSolution, x: float) -> float:
    """Signal power gain in dB after ``x`` unit cells (idler seed neglected)."""
    if x < 0:
        raise InvalidParameterError(f"x must be >= 0, got {x!r}")
    g = sol.g_abs
    gx = g * x
    if gx < SMALL_GX:
        return 10.0 * math.log10(1.0 + (sol.delta_k * x / 2.0) ** 2)
    r = sol.delta_k / (2.0 * g)
    if sol.imaginary:
        return 10.0 * math.log10(math.cos(gx) ** 2 + r * r * math.sin(gx) ** 2)
    if gx > _LOG_SWITCH:
        # cosh^2 ~ sinh^2 ~ e^{2gx}/4
        return 10.0 * (math.log10(1.0 + r * r) + (2.0 * gx - 2.0 * math.log(2.0)) / math.log(10.0))
    return 10.0 * math.log10(math.cosh(gx) ** 2 + r * r * math.sinh(gx) ** 2)


def signal_amplitude(sol: StrongPumpSolution, x: float, a_s0: complex, a_i0: complex = 0.0) -> complex:
    """Complex signal envelope after ``x`` unit cells.

    Solves da_s/dx = i beta_s conj(a_i) exp(i dk x) and its idler partner,
    so the idler cross term enters with +i beta_s/g.
    """
    if x < 0:
        raise InvalidParameterError(f"x must be >= 0, got {x!r}")
    c, s = _c_and_s(sol, x)
    dk = sol.delta_k
    out = (c - 0.5j * dk * s) * a_s0 + 1j * sol.beta_s * s * complex(a_i0).conjugate()
    return out * cmath.exp(0.5j * dk * x)


def idler_amplitude(sol: StrongPumpSolution, x: float, a_s0: complex, a_i0: complex = 0.0) -> complex:
    if x < 0:
        raise InvalidParameterError(f"x must be >= 0, got {x!r}")
    c, s = _c_and_s(sol, x)
    dk = sol.delta_k
    out = (c - 0.5j * dk * s) * a_i0 + 1j * sol.beta_i * s * complex(a_s0).conjugate()
    return out * cmath.exp(0.5j * dk * x)
