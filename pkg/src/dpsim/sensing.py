"""Motion-capture measurement model and a simple pose/velocity observer."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dynamics import wrap_angle
from .errors import NotReady, ParameterError

DEFAULT_SIGMA_P = 0.0033  # m, 3 sigma = 1 cm
DEFAULT_SIGMA_THETA = np.deg2rad(0.17)  # 3 sigma ~ 0.5 deg


@dataclass(frozen=True)
class MoCapModel:
    sigma_p: float = DEFAULT_SIGMA_P
    sigma_theta: float = DEFAULT_SIGMA_THETA
    rate: float = 100.0
    dropout: float = 0.0
    seed: int | None = 0

    def __post_init__(self):
        if self.sigma_p < 0 or self.sigma_theta < 0:
            raise ParameterError("noise levels must be non-negative")
        if not self.rate > 0:
            raise ParameterError("sample rate must be positive")
        if not 0 <= self.dropout < 1:
            raise ParameterError("dropout must be in [0, 1)")


@dataclass(frozen=True)
class Measurement:
    t: float
    pose: np.ndarray | None  # (x, y, psi); None marks a dropout

    @property
    def valid(self) -> bool:
        return self.pose is not None


class MoCap:
    """Sampled, noisy planar pose sensor.

    ``measure`` returns ``None`` between sample instants, a dropout
    :class:`Measurement` (``pose is None``) with probability ``dropout``, and
    otherwise the true (x, y, psi) plus independent Gaussian noise.
    """

    def __init__(self, model: MoCapModel):
        self.model = model
        self.rng = np.random.default_rng(model.seed)
        self._last_k = -1
        self._sigma = np.array([model.sigma_p, model.sigma_p, model.sigma_theta])

    def measure(self, eta, t):
        k = round(t * self.model.rate)
        if abs(t * self.model.rate - k) > 1e-6 or k <= self._last_k:
            return None
        self._last_k = k
        # draw noise and dropout every sample so streams stay aligned across settings
        noise = self.rng.standard_normal(3)
        drop = self.rng.random() < self.model.dropout
        if drop:
            return Measurement(t, None)
        eta = np.asarray(eta, dtype=float)
        pose = np.array([eta[0], eta[1], eta[5]]) if eta.size == 6 else eta.copy()
        if self.model.sigma_p or self.model.sigma_theta:
            pose = pose + self._sigma * noise
            pose[2] = wrap_angle(pose[2])
        return Measurement(t, pose)


def measure(truth, model: MoCapModel, t, rng=None):
    """Single noisy measurement of ``truth`` (a VesselState) at time ``t``.

    Returns ``None`` when ``t`` is not a sample instant of the sensor.
    """
    if abs(t * model.rate - round(t * model.rate)) > 1e-6:
        return None
    rng = np.random.default_rng(model.seed) if rng is None else rng
    noise = rng.standard_normal(3)
    if rng.random() < model.dropout:
        return Measurement(t, None)
    pose = np.array([truth.eta[0], truth.eta[1], truth.eta[5]])
    sigma = np.array([model.sigma_p, model.sigma_p, model.sigma_theta])
    if model.sigma_p or model.sigma_theta:
        pose = pose + sigma * noise
        pose[2] = wrap_angle(pose[2])
    return Measurement(t, pose)


class Observer:
    """Held pose plus low-pass-filtered finite-difference velocity.

    Stand-in for a full EKF. Velocity is world-frame (x_dot, y_dot, psi_dot).
    """

    def __init__(self, tau=0.2):
        if not tau > 0:
            raise ParameterError("observer time constant must be positive")
        self.tau = tau
        self.pose = None
        self.velocity = np.zeros(3)
        self._t_last = None

    @property
    def ready(self) -> bool:
        return self.pose is not None

    def update(self, meas: Measurement | None):
        if meas is None or not meas.valid:
            return
        if self.pose is not None:
            dt = meas.t - self._t_last
            if dt > 0:
                diff = meas.pose - self.pose
                diff[2] = wrap_angle(diff[2])
                raw = diff / dt
                alpha = dt / (self.tau + dt)
                self.velocity = self.velocity + alpha * (raw - self.velocity)
        self.pose = np.array(meas.pose, dtype=float)
        self._t_last = meas.t

    def estimate(self):
        if self.pose is None:
            raise NotReady("observer has no measurement yet")
        return self.pose.copy(), self.velocity.copy()


def observe(stream, tau=0.2):
    """Run an :class:`Observer` over ``stream`` and return the final estimate."""
    obs = Observer(tau)
    for m in stream:
        obs.update(m)
    return obs.estimate()


def write_measurements(path, stream):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "x_m", "y_m", "psi_m", "valid"])
        for m in stream:
            if m.valid:
                w.writerow([repr(float(m.t)), *(repr(float(v)) for v in m.pose), 1])
            else:
                w.writerow([repr(float(m.t)), "", "", "", 0])


def read_measurements(path):
    out = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            t = float(row["t"])
            if int(row["valid"]):
                out.append(Measurement(t, np.array([float(row["x_m"]), float(row["y_m"]), float(row["psi_m"])])))
            else:
                out.append(Measurement(t, None))
    return out
