"""Fixed-step RK4 integration and the generic simulation loop."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import VesselState, embed_planar, eom_rhs, wrap_angle
from .errors import ConfigError, IntegrationDiverged

STATE_COLUMNS = ["x", "y", "z", "phi", "theta", "psi", "u", "v", "w", "p", "q", "r"]
LOAD_COLUMNS = ["tau_x", "tau_y", "tau_n"]


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    duration: float = 10.0
    initial: VesselState = field(default_factory=VesselState.zero)
    control_period: int = 1  # controller updates every ``control_period`` steps

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (self.duration >= 0 and math.isfinite(self.duration)):
            raise ConfigError(f"duration must be non-negative, got {self.duration}")
        if self.n_steps > 10**9:
            raise ConfigError("duration/dt exceeds the step counter")
        if int(self.control_period) < 1:
            raise ConfigError("control_period must be >= 1")

    @property
    def n_steps(self) -> int:
        # tolerate round-off so that 1.0/0.01 is 100 steps, not 101
        return int(math.ceil(self.duration / self.dt - 1e-9))


def _deriv(t, x, load_fn, mats, nu_c):
    state = VesselState.from_vector(x)
    tau = np.asarray(load_fn(t, state), dtype=float)
    if tau.shape == (3,):
        tau = embed_planar(tau)
    with np.errstate(over="ignore", invalid="ignore"):
        eta_dot, nu_dot = eom_rhs(state, tau, mats, nu_c)
    dx = np.concatenate([eta_dot, nu_dot])
    if not np.all(np.isfinite(dx)):
        raise IntegrationDiverged(t, state, "non-finite derivative")
    return dx


def rk4_step(state: VesselState, load_fn, t: float, dt: float, mats, nu_c=None) -> VesselState:
    """One classical RK4 step of the stacked (eta, nu) state.

    ``load_fn(t, state)`` returns a 6-DOF (or planar 3-DOF) load; it is called at
    every stage, so anything that must be held over the step has to be captured
    by the caller.
    """
    if not dt > 0:
        raise ConfigError("dt must be positive")
    x = state.as_vector()
    h2 = 0.5 * dt
    k1 = _deriv(t, x, load_fn, mats, nu_c)
    k2 = _deriv(t + h2, x + h2 * k1, load_fn, mats, nu_c)
    k3 = _deriv(t + h2, x + h2 * k2, load_fn, mats, nu_c)
    k4 = _deriv(t + dt, x + dt * k3, load_fn, mats, nu_c)
    with np.errstate(over="ignore", invalid="ignore"):
        x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_new)):
        raise IntegrationDiverged(t + dt, state, "non-finite state")
    x_new[3:6] = wrap_angle(x_new[3:6])
    return VesselState.from_vector(x_new)


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # (N, 12)
    loads: np.ndarray  # (N, 6), load applied from t[k] to t[k+1]

    def __len__(self):
        return len(self.t)

    def table(self) -> np.ndarray:
        planar = self.loads[:, [0, 1, 5]]
        return np.column_stack([self.t, self.states, planar])

    def to_csv(self, path):
        write_csv(path, ["t", *STATE_COLUMNS, *LOAD_COLUMNS], self.table())


def write_csv(path, columns, data):
    np.savetxt(path, data, delimiter=",", header=",".join(columns), comments="", fmt="%.17g")


def run_sim(config: SimConfig, controller_fn, mats, nu_c=None, disturbance_fn=None, stop_fn=None):
    """Simulate a controlled vessel.

    ``controller_fn(t, state)`` is evaluated at step boundaries (every
    ``config.control_period`` steps) and its output is held constant over the
    RK4 stages. ``disturbance_fn(t, state)`` is an optional exogenous load
    evaluated per stage. ``stop_fn(t, state)`` may end the run early.

    Returns a :class:`Trajectory` with ``n_steps + 1`` samples (fewer only if
    ``stop_fn`` fires). The last sample repeats the last applied load.
    """
    n = config.n_steps
    dt = config.dt
    times = np.arange(n + 1) * dt
    states = np.zeros((n + 1, 12))
    loads = np.zeros((n + 1, 6))
    state = config.initial
    states[0] = state.as_vector()
    tau = np.zeros(6)
    last = n
    for k in range(n):
        t = times[k]
        if k % config.control_period == 0:
            tau = np.asarray(controller_fn(t, state), dtype=float)
            if tau.shape == (3,):
                tau = embed_planar(tau)
        held = tau.copy()
        if disturbance_fn is None:
            load_fn = lambda _t, _s, held=held: held
        else:
            load_fn = lambda _t, _s, held=held: held + _as6(disturbance_fn(_t, _s))
        loads[k] = held
        state = rk4_step(state, load_fn, t, dt, mats, nu_c)
        states[k + 1] = state.as_vector()
        loads[k + 1] = held
        if stop_fn is not None and stop_fn(times[k + 1], state):
            last = k + 1
            break
    return Trajectory(times[: last + 1], states[: last + 1], loads[: last + 1])


def _as6(tau):
    tau = np.asarray(tau, dtype=float)
    return embed_planar(tau) if tau.shape == (3,) else tau
