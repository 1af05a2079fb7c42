"""Closed-loop scenario execution.

Loop per step: sensor -> observer -> reference filter -> controller ->
multiplexer -> allocator -> plant (RK4).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..allocation import allocate, config_matrix
from ..dynamics import VesselState, build_matrices, embed_planar, transform_J
from ..errors import ConfigError, EmptyWindowError, MissionTimeout
from ..gnc import ControlMode, DPController, PoseGains, RefFilterState, VelGains
from ..integrator import STATE_COLUMNS, LOAD_COLUMNS, rk4_step, write_csv
from ..seastate import SpectrumParams, elevation, realize, wave_load
from ..sensing import MoCap, MoCapModel, Observer, read_measurements, write_measurements
from .config import Scenario, load_vessel
from .metrics import MetricsReport, compute_metrics
from .mission import HoldCondition, MissionSupervisor, four_corner_mission

log = logging.getLogger(__name__)

MODE_CODES = {ControlMode.POSE: 0, ControlMode.VELOCITY: 1, ControlMode.EXTERNAL: 2}
PLANAR_IDX = [0, 1, 5]


@dataclass
class RunResult:
    columns: list
    data: np.ndarray
    metrics: MetricsReport | None
    mission_complete: bool
    layout: object

    def column(self, name) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def columns_of(self, names) -> np.ndarray:
        return self.data[:, [self.columns.index(n) for n in names]]


def build_setpoints(sc: Scenario):
    m = sc.mission
    if m is None:
        p = sc.initial_pose
        return [np.array([p[0], p[1], np.deg2rad(p[2])])], None
    hold = HoldCondition(m.hold.pos_tol, np.deg2rad(m.hold.yaw_tol_deg), m.hold.speed_tol, m.hold.hold_time)
    if m.type == "four_corner":
        pts = four_corner_mission(m.box, np.deg2rad(m.yaw_deg))
    else:
        pts = [np.array([s[0], s[1], np.deg2rad(s[2])]) for s in m.setpoints]
    return pts, hold


def build_controller(sc: Scenario, mats, layout, eta0):
    c = sc.control
    M3, D3 = mats.planar()
    M3 = M3 * c.velocity.model_mismatch
    D3 = D3 * c.velocity.model_mismatch
    ki = np.asarray(c.velocity.ki, dtype=float)
    if c.velocity.xi_max is None:
        # M Ki xi_max = 50% of the per-axis thrust capacity
        xi_max = 0.5 * layout.capacity() / (np.diag(M3) * ki)
    else:
        xi_max = np.asarray(c.velocity.xi_max, dtype=float)
    try:
        filt = RefFilterState.at_rest(eta0, c.ref_filter.omega, c.ref_filter.delta)
        pose = PoseGains(np.asarray(c.pose.kp, float), np.asarray(c.pose.kd, float))
        vel = VelGains(np.asarray(c.velocity.kp, float), ki, xi_max=xi_max)
    except ConfigError as err:
        raise ConfigError(f"control: {err}") from None
    return DPController(filt, pose, vel, M3, D3, mode=sc.modes[0].mode)


def _mode_at(sc: Scenario, t):
    active = sc.modes[0]
    for m in sc.modes:
        if m.t <= t + 1e-9:
            active = m
    return active


def run_scenario(sc: Scenario, write=True, out_dir=None) -> RunResult:
    """Run a scenario; optionally write trajectory CSV and metrics JSON.

    Raises ``IntegrationDiverged`` on divergence, ``MissionTimeout`` (after
    writing outputs) if the mission does not complete, ``EmptyWindowError`` if
    there is nothing to evaluate.
    """
    params, layout = load_vessel(sc)
    mats = build_matrices(params)
    nu_c = params.nu_c
    B = config_matrix(layout)
    dt = sc.dt
    period = sc.control.period_steps
    n_max = int(math.ceil(sc.duration / dt - 1e-9))

    ip = sc.initial_pose
    eta0 = np.array([ip[0], ip[1], np.deg2rad(ip[2])])
    state = VesselState(np.array([eta0[0], eta0[1], 0, 0, 0, eta0[2]]), np.zeros(6))
    ctrl = build_controller(sc, mats, layout, eta0)
    setpoints, hold = build_setpoints(sc)
    mission = MissionSupervisor(setpoints, hold) if hold is not None else None

    sensor = observer = replay = None
    measurements = []
    if sc.sensing is not None:
        s = sc.sensing
        observer = Observer(s.observer_tau)
        if s.replay:
            replay = {round(m.t / dt): m for m in read_measurements(sc.resolve(s.replay))}
        else:
            sensor = MoCap(MoCapModel(s.sigma_p, np.deg2rad(s.sigma_theta_deg), s.rate, s.dropout, sc.seed))

    waves = gain = None
    if sc.sea_state is not None:
        ss = sc.sea_state
        waves = realize(SpectrumParams(ss.hs, ss.tp, ss.gamma, ss.n), seed=sc.seed)
        gain = np.asarray(ss.gain, dtype=float)

    u_names = layout.column_names()
    a_names = layout.azimuth_names()
    columns = (
        ["t", *STATE_COLUMNS, *LOAD_COLUMNS,
         "tau_cmd_x", "tau_cmd_y", "tau_cmd_n",
         "eta_d_x", "eta_d_y", "eta_d_psi", "eta_d_dot_x", "eta_d_dot_y", "eta_d_dot_psi",
         "eta_r_x", "eta_r_y", "eta_r_psi",
         "nu_err_u", "nu_err_v", "nu_err_r", "xi_u", "xi_v", "xi_r", "V",
         "mode", "setpoint", "x_dot", "y_dot", "psi_dot", "fb_x", "fb_y", "fb_psi"]
        + u_names + a_names
        + (["tau_wave_x", "tau_wave_y", "tau_wave_n", "eta_w"] if waves is not None else [])
    )
    rows = []
    out = alloc = None
    complete = False
    for k in range(n_max + 1):
        t = k * dt
        eta_dot = transform_J(state.eta) @ state.nu
        truth3 = state.eta[PLANAR_IDX]
        truth_rate3 = eta_dot[PLANAR_IDX]

        if observer is not None:
            meas = replay.get(k) if replay is not None else sensor.measure(state.eta, t)
            if meas is not None:
                measurements.append(meas)
            observer.update(meas)
            if observer.ready:
                fb_eta, fb_rate = observer.estimate()
            else:
                fb_eta, fb_rate = truth3.copy(), np.zeros(3)
        else:
            fb_eta, fb_rate = truth3, truth_rate3

        eta_r = mission.target if mission is not None else setpoints[0]
        if k % period == 0:
            entry = _mode_at(sc, t)
            ctrl.set_mode(entry.mode)
            out = ctrl.step(fb_eta, fb_rate, eta_r, dt * period, nu_d=entry.nu_d, tau_ext=entry.tau)
            alloc = allocate(out.tau, layout, dt * period, B)
        tau_plant = alloc.tau_real

        seg = mission.index if mission is not None else 0
        row = [t, *state.as_vector(), *tau_plant, *out.tau, *out.eta_d, *out.eta_d_dot, *eta_r,
               *out.nu_err, *out.xi, out.V, MODE_CODES[out.mode], seg, *truth_rate3,
               *fb_eta, *alloc.u, *layout.azimuth_angles(alloc.u)]
        if waves is not None:
            row += [*wave_load(waves, gain, t), float(elevation(waves, t))]
        rows.append(row)

        if mission is not None:
            speed = float(np.hypot(truth_rate3[0], truth_rate3[1]))
            complete = mission.update(t, truth3, speed)
            if complete:
                break
        if k == n_max:
            break

        tau6 = embed_planar(tau_plant)
        if waves is None:
            load_fn = lambda _t, _s, tau6=tau6: tau6
        else:
            load_fn = lambda _t, _s, tau6=tau6: tau6 + embed_planar(wave_load(waves, gain, _t))
        state = rk4_step(state, load_fn, t, dt, mats, nu_c)

    data = np.asarray(rows, dtype=float)
    result = RunResult(columns, data, None, complete, layout)

    metrics = None
    if mission is not None and mission.advance_times:
        start = int(round(mission.advance_times[0] / dt))
        metrics = _metrics(sc, result, start, mission)
    result.metrics = metrics

    if write:
        base = Path(out_dir) if out_dir is not None else None
        _write_outputs(sc, result, base, measurements, waves)

    if mission is not None and not complete:
        raise MissionTimeout(
            f"mission incomplete after {sc.duration} s (setpoint {mission.index} of {len(setpoints)})"
        )
    if metrics is None:
        raise EmptyWindowError("metric evaluation window is empty")
    return result


def _metrics(sc, result, start, mission) -> MetricsReport:
    pose = result.columns_of(["x", "y", "psi"])
    vel = result.columns_of(["x_dot", "y_dot"])
    if sc.metrics.reference == "filter":
        ref = result.columns_of(["eta_d_x", "eta_d_y", "eta_d_psi"])
        ref_vel = result.columns_of(["eta_d_dot_x", "eta_d_dot_y"])
    else:
        ref = result.columns_of(["eta_r_x", "eta_r_y", "eta_r_psi"])
        ref_vel = np.zeros_like(vel)
    seg = result.column("setpoint").astype(int)
    rep = compute_metrics(result.column("t"), pose, vel, ref, ref_vel, start=start, segment=seg)
    # settling: time from setpoint activation to the start of its completed hold
    starts = [0.0] + mission.advance_times[:-1]
    for i, (t0, t1) in enumerate(zip(starts, mission.advance_times)):
        rep.settling_times[i] = float(t1 - mission.hold.hold_time - t0)
    rep.extra = {
        "mission_complete": bool(mission.complete),
        "mission_time_s": float(result.column("t")[-1]),
        "reference": sc.metrics.reference,
    }
    return rep


def _write_outputs(sc, result, base, measurements, waves):
    def target(p):
        p = Path(p)
        if base is not None and not p.is_absolute():
            return base / p
        return sc.resolve(p)

    traj = target(sc.output.trajectory)
    traj.parent.mkdir(parents=True, exist_ok=True)
    write_csv(traj, result.columns, result.data)
    if result.metrics is not None:
        target(sc.output.metrics).write_text(result.metrics.to_json())
    if sc.output.measurements and measurements:
        write_measurements(target(sc.output.measurements), measurements)
    if sc.output.elevation and waves is not None:
        write_csv(target(sc.output.elevation), ["t", "eta_w"],
                  result.columns_of(["t", "eta_w"]))
