"""Run configuration: JSON schema, preset merging and conversion to SI.

User-facing units are GHz, uA, fF, pH and dBm. ``RunConfig`` methods turn
a validated config into the objects used by the solvers.
"""

from __future__ import annotations

import copy
import json
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sando.cme import InitialConditions, IntegratorSettings
from sando.errors import ConfigError, InvalidParameterError
from sando.units import AmplitudeConvention, DEFAULT_CONVENTION, PhysicalDeviceParams, ResonatorParams, normalize

_TABLE1 = {
    "device": {"I_c": 5.0, "C_J": 200.0, "C_G0": 26.3, "C_G1": 26.3, "N_JJ": 1998, "Z0": 50.0, "cell": "sando"},
    "geometry": {"x0": 0.75},
    "pump": {"f_p": 10.0, "ip_over_ic": 0.5},
    "seeds": {"is_over_ip": 1e-5, "ii_over_ip": 1e-8},
}
_RPM = copy.deepcopy(_TABLE1)
_RPM["device"].update(C_G0=6.33, resonator={"C_c": 20.0, "C_r": 6000.0, "L_r": 40.6})
PRESETS = {"table1": _TABLE1, "rpm": _RPM}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ResonatorConfig(_Strict):
    C_c: float = Field(gt=0, description="coupling capacitance, fF")
    C_r: float = Field(gt=0, description="resonator capacitance, fF")
    L_r: float = Field(gt=0, description="resonator inductance, pH")


class DeviceConfig(_Strict):
    I_c: float = Field(gt=0, description="critical current, uA")
    C_J: float = Field(gt=0, description="junction capacitance, fF")
    C_G0: float = Field(gt=0, description="central ground capacitance, fF")
    C_G1: float = Field(ge=0, description="outer ground capacitance, fF")
    N_JJ: int = Field(ge=0)
    Z0: float = Field(50.0, gt=0, description="ohm")
    cell: Literal["sando", "single"] = "sando"
    resonator: Optional[ResonatorConfig] = None

    @model_validator(mode="after")
    def _cell_rules(self):
        if self.cell == "sando" and self.N_JJ % 3:
            raise ValueError(f"N_JJ={self.N_JJ} must be divisible by 3 for a Sando cell")
        if self.cell == "single" and self.C_G1 != 0:
            raise ValueError("C_G1 must be 0 for a single-junction cell")
        return self


class GeometryConfig(_Strict):
    x0: float = Field(gt=0, le=1)


class PumpConfig(_Strict):
    f_p: float = Field(gt=0, description="GHz")
    ip_over_ic: float = Field(gt=0)


class SeedConfig(_Strict):
    is_over_ip: float = Field(1e-5, ge=0)
    ii_over_ip: float = Field(1e-8, ge=0)
    theta_p: float = 0.0
    theta_s: float = 0.0
    theta_i: float = 0.0


class IntegratorConfig(_Strict):
    rtol: float = Field(1e-10, gt=0)
    atol: float = Field(1e-14, gt=0)
    max_step: float = Field(0.5, gt=0)
    max_steps: int = Field(50_000_000, gt=0)


class OutputConfig(_Strict):
    dir: str = "sando-out"
    format: Literal["csv"] = "csv"


class RangeConfig(_Strict):
    start: float
    stop: float
    step: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.stop >= self.start:
            raise ValueError("stop must be >= start")
        return self

    def samples(self) -> np.ndarray:
        n = int(round((self.stop - self.start) / self.step))
        return np.round(self.start + self.step * np.arange(n + 1), 12)


class SpectrumConfig(_Strict):
    f_s: RangeConfig = RangeConfig(start=1.0, stop=19.0, step=0.05)
    guard_ghz: float = Field(0.001, ge=0)


class ScanConfig(_Strict):
    f_s: float = Field(10.05, gt=0, description="GHz")
    n_max: int = Field(200_000, gt=0, le=200_000)
    stride: float = Field(1.0, gt=0, description="unit cells between samples")


class SweepConfig(_Strict):
    axis: Literal["x0", "ip_over_ic", "f_p"] = "x0"
    values: RangeConfig = RangeConfig(start=0.05, stop=1.0, step=0.005)


class CompressionConfig(_Strict):
    p_start: float = Field(-130.0, description="dBm")
    p_stop: float = Field(-60.0, description="dBm")
    p_step: float = Field(2.0, gt=0)
    tol_db: float = Field(0.02, gt=0)


class TrendsConfig(_Strict):
    x0: RangeConfig = RangeConfig(start=0.05, stop=1.0, step=0.005)


class RunConfig(_Strict):
    defaults: Optional[Literal["table1", "rpm"]] = None
    device: DeviceConfig
    geometry: GeometryConfig
    pump: PumpConfig
    seeds: SeedConfig = SeedConfig()
    convention: AmplitudeConvention = DEFAULT_CONVENTION
    engine: Literal["analytic", "ode"] = "analytic"
    integrator: IntegratorConfig = IntegratorConfig()
    output: OutputConfig = OutputConfig()
    spectrum: SpectrumConfig = SpectrumConfig()
    scan: ScanConfig = ScanConfig()
    sweep: SweepConfig = SweepConfig()
    compression: CompressionConfig = CompressionConfig()
    trends: TrendsConfig = TrendsConfig()
    workers: int = Field(1, ge=1)

    def device_params(self) -> PhysicalDeviceParams:
        d = self.device
        res = None
        if d.resonator is not None:
            r = d.resonator
            res = ResonatorParams(C_c=r.C_c * 1e-15, C_r=r.C_r * 1e-15, L_r=r.L_r * 1e-12)
        return PhysicalDeviceParams(
            I_c=d.I_c * 1e-6,
            C_J=d.C_J * 1e-15,
            C_G0=d.C_G0 * 1e-15,
            C_G1=d.C_G1 * 1e-15,
            N_JJ=d.N_JJ,
            Z0=d.Z0,
            resonator=res,
            cell=d.cell,
        )

    def model(self):
        return normalize(self.device_params(), self.geometry.x0)

    def initial_conditions(self) -> InitialConditions:
        s = self.seeds
        return InitialConditions(
            ip_over_ic=self.pump.ip_over_ic,
            is_over_ip=s.is_over_ip,
            ii_over_ip=s.ii_over_ip,
            theta_p=s.theta_p,
            theta_s=s.theta_s,
            theta_i=s.theta_i,
            convention=self.convention,
        )

    def integrator_settings(self) -> IntegratorSettings:
        return IntegratorSettings(**self.integrator.model_dump())

    @property
    def f_p_hz(self) -> float:
        return self.pump.f_p * 1e9


def deep_merge(base: dict, top: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in top.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _first_error(exc: ValidationError) -> ConfigError:
    err = exc.errors()[0]
    loc = ".".join(str(p) for p in err["loc"])
    msg = err["msg"].removeprefix("Value error, ")
    # model-level validators report at the parent; name the field they check
    if "N_JJ" in msg and not loc.endswith("N_JJ"):
        loc = f"{loc}.N_JJ" if loc else "N_JJ"
    elif "C_G1" in msg and not loc.endswith("C_G1"):
        loc = f"{loc}.C_G1" if loc else "C_G1"
    if err["type"] == "missing":
        msg = "required field is missing"
    return ConfigError(loc or "<root>", msg)


def build_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    preset = data.get("defaults")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("defaults", f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
        data = deep_merge(PRESETS[preset], data)
    try:
        cfg = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise _first_error(exc) from None
    try:
        cfg.device_params()
    except InvalidParameterError as exc:
        raise ConfigError("device", str(exc)) from None
    return cfg


def parse_config(text: str) -> RunConfig:
    """Validate a JSON config document; ``defaults`` presets fill unset keys."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return build_config(data)
