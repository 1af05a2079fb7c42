"""Default control stack on the surge/sway/yaw subspace.

* third-order reference filter (forward Euler),
* PD pose controller in the body frame,
* PI velocity controller with acceleration and damping feedforward (PI-RFF),
* a multiplexer selecting which controller drives the thrusters.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import wrap_angle
from .errors import ConfigError

EULER_MARGIN = 0.1  # forward-Euler stability: dt * max(omega) must stay below this


def rot_z(psi) -> np.ndarray:
    c, s = np.cos(psi), np.sin(psi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _spd(K, name):
    K = np.asarray(K, dtype=float)
    if K.ndim == 1:
        K = np.diag(K)
    if K.shape != (3, 3):
        raise ConfigError(f"{name} must be 3x3 or a length-3 diagonal")
    if not np.allclose(K, K.T, rtol=0, atol=1e-12):
        raise ConfigError(f"{name} must be symmetric")
    if np.min(np.linalg.eigvalsh(K)) <= 0:
        raise ConfigError(f"{name} must be positive definite")
    return K


def filter_matrices(omega, delta):
    """State-space matrices (A_d, B_d) of the reference model."""
    W = np.diag(omega)
    Dl = np.diag(delta)
    I3 = np.eye(3)
    Z = np.zeros((3, 3))
    W2 = W @ W
    W3 = W2 @ W
    A = np.block([
        [Z, I3, Z],
        [Z, Z, I3],
        [-W3, -(2.0 * Dl + I3) @ W2, -(2.0 * Dl + I3) @ W],
    ])
    B = np.vstack([Z, Z, W3])
    return A, B


@dataclass(frozen=True)
class RefFilterState:
    x: np.ndarray
    omega: np.ndarray = field(default_factory=lambda: np.array([0.6, 0.6, 0.9]))
    delta: np.ndarray = field(default_factory=lambda: np.ones(3))

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(9)
        omega = np.asarray(self.omega, dtype=float).reshape(3)
        delta = np.asarray(self.delta, dtype=float).reshape(3)
        if np.any(omega <= 0) or np.any(delta <= 0):
            raise ConfigError("filter bandwidth and damping must be positive")
        if not np.all(np.isfinite(x)):
            raise ConfigError("filter state must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def at_rest(cls, eta, omega=(0.6, 0.6, 0.9), delta=(1.0, 1.0, 1.0)):
        x = np.zeros(9)
        x[:3] = eta
        return cls(x, np.asarray(omega, float), np.asarray(delta, float))

    @property
    def eta_d(self):
        return self.x[:3]

    @property
    def eta_d_dot(self):
        return self.x[3:6]

    @property
    def eta_d_ddot(self):
        return self.x[6:]

    def matrices(self):
        return filter_matrices(self.omega, self.delta)


def ref_filter_step(state: RefFilterState, eta_r, dt) -> RefFilterState:
    if not dt > 0:
        raise ConfigError("dt must be positive")
    if dt * np.max(state.omega) >= EULER_MARGIN:
        raise ConfigError(
            f"dt={dt} too large for filter bandwidth {np.max(state.omega)} rad/s"
        )
    eta_r = np.array(eta_r, dtype=float)
    # take the short way round in heading
    eta_r[2] = state.x[2] + wrap_angle(eta_r[2] - state.x[2])
    A, B = state.matrices()
    x = state.x + dt * (A @ state.x + B @ eta_r)
    return replace(state, x=x)


@dataclass(frozen=True)
class PoseGains:
    kp: np.ndarray
    kd: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kp", _spd(self.kp, "pose kp"))
        object.__setattr__(self, "kd", _spd(self.kd, "pose kd"))


def pose_error(eta, eta_d):
    """World-frame pose error with the heading wrapped to (-pi, pi]."""
    e = np.asarray(eta, dtype=float) - np.asarray(eta_d, dtype=float)
    e[2] = wrap_angle(e[2])
    return e


def pose_control(eta, eta_dot, filt: RefFilterState, gains: PoseGains):
    """PD law ``-Kp R^T (eta - eta_d) - Kd R^T (eta_dot - eta_d_dot)``."""
    Rt = rot_z(eta[2]).T
    e = pose_error(eta, filt.eta_d)
    e_dot = np.asarray(eta_dot, dtype=float) - filt.eta_d_dot
    return -gains.kp @ (Rt @ e) - gains.kd @ (Rt @ e_dot)


@dataclass(frozen=True)
class VelGains:
    kp: np.ndarray
    ki: np.ndarray
    xi: np.ndarray = field(default_factory=lambda: np.zeros(3))
    xi_max: np.ndarray = field(default_factory=lambda: np.full(3, np.inf))

    def __post_init__(self):
        kp = np.asarray(self.kp, dtype=float)
        ki = np.asarray(self.ki, dtype=float)
        kp = np.diag(kp) if kp.ndim == 1 else kp
        ki = np.diag(ki) if ki.ndim == 1 else ki
        for K, name in ((kp, "kp"), (ki, "ki")):
            if K.shape != (3, 3) or np.count_nonzero(K - np.diag(np.diag(K))):
                raise ConfigError(f"velocity {name} must be diagonal")
            if np.any(np.diag(K) <= 0):
                raise ConfigError(f"velocity {name} must be positive")
        xi_max = np.broadcast_to(np.asarray(self.xi_max, dtype=float), (3,)).copy()
        if np.any(xi_max <= 0):
            raise ConfigError("xi_max must be positive")
        object.__setattr__(self, "kp", kp)
        object.__setattr__(self, "ki", ki)
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float).reshape(3))
        object.__setattr__(self, "xi_max", xi_max)


def velocity_control(nu, nu_d, nu_d_dot, gains: VelGains, M, D, dt, xi=None):
    """PI-RFF velocity law.

    ``a = nu_d_dot - Kp (nu - nu_d) - Ki xi`` and ``tau = M a + D nu_d``; the
    integral state (``gains.xi`` unless ``xi`` is given) is advanced by forward
    Euler and clamped to ``xi_max``. Returns ``(tau, xi_next)``.
    """
    xi = gains.xi if xi is None else np.asarray(xi, dtype=float)
    nu_err = np.asarray(nu, dtype=float) - nu_d
    a = nu_d_dot - gains.kp @ nu_err - gains.ki @ xi
    tau = M @ a + D @ nu_d
    xi = np.clip(xi + dt * nu_err, -gains.xi_max, gains.xi_max)
    return tau, xi


def lyapunov(nu_err, xi, M, Ki) -> float:
    """``V = 1/2 e^T M e + 1/2 xi^T Ki M xi``."""
    return 0.5 * nu_err @ M @ nu_err + 0.5 * xi @ Ki @ M @ xi


class ControlMode(str, enum.Enum):
    POSE = "pose"
    VELOCITY = "velocity"
    EXTERNAL = "external"


def mux_select(mode, candidates: dict):
    """Forward the load of the active mode, untouched."""
    mode = ControlMode(mode)
    if mode not in candidates or candidates[mode] is None:
        raise ConfigError(f"no controller output for active mode '{mode.value}'")
    return candidates[mode]


def body_reference(filt: RefFilterState):
    """Reference velocity and acceleration in the desired body frame."""
    psi_d, r_d = filt.eta_d[2], filt.eta_d_dot[2]
    Rt = rot_z(psi_d).T
    nu_d = Rt @ filt.eta_d_dot
    S = np.array([[0.0, -r_d, 0.0], [r_d, 0.0, 0.0], [0.0, 0.0, 0.0]])
    nu_d_dot = Rt @ filt.eta_d_ddot - S @ nu_d
    return nu_d, nu_d_dot


@dataclass
class ControlOutput:
    tau: np.ndarray
    mode: ControlMode
    eta_d: np.ndarray
    eta_d_dot: np.ndarray
    nu_err: np.ndarray
    xi: np.ndarray
    V: float


class DPController:
    """Reference filter, pose and velocity controllers behind a multiplexer.

    One instance per vessel; ``step`` consumes the feedback for one control
    period and advances all internal state.
    """

    def __init__(self, filt: RefFilterState, pose_gains: PoseGains, vel_gains: VelGains,
                 M, D, mode=ControlMode.POSE):
        self.filt = filt
        self.pose_gains = pose_gains
        self.vel_gains = vel_gains
        self.M = np.asarray(M, dtype=float)
        self.D = np.asarray(D, dtype=float)
        self.mode = ControlMode(mode)

    def set_mode(self, mode):
        mode = ControlMode(mode)
        if mode != self.mode:
            self.vel_gains = replace(self.vel_gains, xi=np.zeros(3))
        self.mode = mode

    def step(self, eta, eta_dot, eta_r, dt, nu_d=None, tau_ext=None) -> ControlOutput:
        """Compute the load for this period, then advance the filter.

        ``nu_d`` overrides the filter-derived body velocity reference in
        velocity mode; ``tau_ext`` is forwarded in external mode.
        """
        eta = np.asarray(eta, dtype=float)
        eta_dot = np.asarray(eta_dot, dtype=float)
        filt = self.filt
        candidates = {}
        nu_err = np.zeros(3)
        V = 0.0
        if self.mode is ControlMode.POSE:
            candidates[ControlMode.POSE] = pose_control(eta, eta_dot, filt, self.pose_gains)
        elif self.mode is ControlMode.VELOCITY:
            if nu_d is None:
                ref, ref_dot = body_reference(filt)
            else:
                ref, ref_dot = np.asarray(nu_d, dtype=float), np.zeros(3)
            nu = rot_z(eta[2]).T @ eta_dot
            nu_err = nu - ref
            V = lyapunov(nu_err, self.vel_gains.xi, self.M, self.vel_gains.ki)
            tau, xi = velocity_control(nu, ref, ref_dot, self.vel_gains, self.M, self.D, dt)
            candidates[ControlMode.VELOCITY] = tau
        else:
            candidates[ControlMode.EXTERNAL] = None if tau_ext is None else np.asarray(tau_ext, float)
        tau = mux_select(self.mode, candidates)
        out = ControlOutput(tau, self.mode, filt.eta_d.copy(), filt.eta_d_dot.copy(),
                            nu_err, self.vel_gains.xi.copy(), V)
        if self.mode is ControlMode.VELOCITY:
            self.vel_gains = replace(self.vel_gains, xi=xi)
        self.filt = ref_filter_step(filt, eta_r, dt)
        return out
