"""Scenario and vessel configuration files (YAML).

Vessel file keys (flat, SI units)::

    L, B, T            hull length, beam, draft [m]
    rho                water density [kg/m^3]            (default 1000)
    added_mass         6 factors of the rigid-body terms  (default 0.2 1 1 1 .5 .5)
    damping            6 linear coefficients              (default: derived)
    damping_ratio      heave/roll/pitch damping ratio     (default 0.1)
    time_constant      surge/sway/yaw time constant [s]   (default 5)
    GM_T, GM_L         metacentric heights [m]            (default: uniform box)
    current            body-frame current, 6 entries      (default 0)
    thrusters          list of {x, y, kind, angle, f_max, rate_max, name}

A scenario file references a vessel file (path relative to the scenario, or
``default``) and holds gains, mission, optional sea state and sensing; see
``Scenario`` below and ``data/four_corner.yaml`` for a complete example.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..allocation import ThrusterLayout
from ..dynamics import VesselParams
from ..errors import ConfigError, DPSimError

Vec3 = list[float]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RefFilterCfg(_Model):
    omega: Vec3 = [0.6, 0.6, 0.9]
    delta: Vec3 = [1.0, 1.0, 1.0]


class PoseCfg(_Model):
    kp: Union[Vec3, list[Vec3]] = [40.0, 40.0, 15.0]
    kd: Union[Vec3, list[Vec3]] = [60.0, 60.0, 20.0]


class VelocityCfg(_Model):
    kp: Vec3 = [1.5, 1.5, 1.5]
    ki: Vec3 = [0.3, 0.3, 0.3]
    xi_max: Optional[Vec3] = None  # default: M Ki xi_max = 50% of thrust capacity
    model_mismatch: float = Field(1.0, gt=0)


class ControlCfg(_Model):
    period_steps: int = Field(1, ge=1)
    ref_filter: RefFilterCfg = RefFilterCfg()
    pose: PoseCfg = PoseCfg()
    velocity: VelocityCfg = VelocityCfg()


class ModeEntry(_Model):
    t: float = Field(0.0, ge=0)
    mode: Literal["pose", "velocity", "external"] = "pose"
    nu_d: Optional[Vec3] = None
    tau: Optional[Vec3] = None

    @model_validator(mode="after")
    def _external_needs_tau(self):
        if self.mode == "external" and self.tau is None:
            raise ValueError("external mode needs 'tau'")
        return self


class HoldCfg(_Model):
    pos_tol: float = Field(0.02, gt=0)
    yaw_tol_deg: float = Field(1.0, gt=0)
    speed_tol: float = Field(0.01, gt=0)
    hold_time: float = Field(2.0, ge=0)


class MissionCfg(_Model):
    type: Literal["four_corner", "setpoints"] = "four_corner"
    box: float = Field(1.0, ge=0)
    yaw_deg: float = 45.0
    setpoints: Optional[list[Vec3]] = None  # (x, y, psi_deg)
    hold: HoldCfg = HoldCfg()

    @model_validator(mode="after")
    def _setpoints_present(self):
        if self.type == "setpoints" and not self.setpoints:
            raise ValueError("setpoint mission needs a non-empty 'setpoints' list")
        return self


class SeaStateCfg(_Model):
    hs: float = Field(0.05, gt=0)
    tp: float = Field(1.5, gt=0)
    gamma: float = Field(3.3, ge=1)
    n: int = Field(200, ge=2)
    gain: Vec3 = [0.0, 0.0, 0.0]


class SensingCfg(_Model):
    sigma_p: float = Field(0.0033, ge=0)
    sigma_theta_deg: float = Field(0.17, ge=0)
    rate: float = Field(100.0, gt=0)
    dropout: float = Field(0.0, ge=0, lt=1)
    observer_tau: float = Field(0.2, gt=0)
    replay: Optional[str] = None  # measurement CSV to feed instead of the sensor model


class MetricsCfg(_Model):
    reference: Literal["filter", "setpoint"] = "filter"


class OutputCfg(_Model):
    trajectory: str = "trajectory.csv"
    metrics: str = "metrics.json"
    measurements: Optional[str] = None
    elevation: Optional[str] = None


class Scenario(_Model):
    vessel: Union[str, dict] = "default"
    dt: float = Field(0.01, gt=0)
    duration: float = Field(300.0, ge=0)
    seed: int = 0
    initial_pose: Vec3 = [0.0, 0.0, 0.0]  # x, y, psi_deg
    control: ControlCfg = ControlCfg()
    modes: list[ModeEntry] = [ModeEntry()]
    mission: Optional[MissionCfg] = MissionCfg()
    sea_state: Optional[SeaStateCfg] = None
    sensing: Optional[SensingCfg] = None
    metrics: MetricsCfg = MetricsCfg()
    output: OutputCfg = OutputCfg()
    base_dir: Optional[str] = Field(None, exclude=True)

    @field_validator("modes")
    @classmethod
    def _modes_sorted(cls, v):
        if not v:
            raise ValueError("at least one mode entry is required")
        times = [m.t for m in v]
        if times != sorted(times):
            raise ValueError("mode schedule must be sorted by time")
        return v

    def resolve(self, path) -> Path:
        p = Path(path)
        if not p.is_absolute() and self.base_dir is not None:
            p = Path(self.base_dir) / p
        return p


def _format_error(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def parse_scenario(data: dict, base_dir=None) -> Scenario:
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a mapping")
    try:
        sc = Scenario.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_format_error(err)) from None
    sc.base_dir = None if base_dir is None else str(base_dir)
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as err:
        raise ConfigError(f"cannot read scenario {path}: {err}") from None
    return parse_scenario(data or {}, base_dir=path.parent)


def default_scenario_path():
    return resources.files("dpsim") / "data" / "four_corner.yaml"


def default_scenario() -> Scenario:
    with resources.as_file(default_scenario_path()) as p:
        return load_scenario(p)


def _vessel_dict(sc: Scenario) -> dict:
    if isinstance(sc.vessel, dict):
        return dict(sc.vessel)
    if sc.vessel == "default":
        text = (resources.files("dpsim") / "data" / "default_vessel.yaml").read_text()
    else:
        path = sc.resolve(sc.vessel)
        try:
            text = path.read_text()
        except OSError as err:
            raise ConfigError(f"vessel: cannot read {path}: {err}") from None
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigError("vessel: file must be a mapping")
    return data


def load_vessel(sc: Scenario):
    """Return (VesselParams, ThrusterLayout) for a scenario."""
    data = _vessel_dict(sc)
    thrusters = data.pop("thrusters", None)
    if not thrusters:
        raise ConfigError("vessel.thrusters: at least one thruster is required")
    try:
        params = VesselParams.from_dict(data)
        layout = ThrusterLayout.from_dicts(thrusters)
    except (TypeError, DPSimError) as err:
        raise ConfigError(f"vessel: {err}") from None
    return params, layout
