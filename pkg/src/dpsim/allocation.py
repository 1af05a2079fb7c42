"""Pseudo-inverse thrust allocation with saturation and rate limits.

Azimuth thrusters use the extended (force-decomposed) formulation: each one
contributes an x- and a y-force column and the angle is recovered afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UnderactuatedError


@dataclass(frozen=True)
class Thruster:
    x: float
    y: float
    kind: str = "fixed"  # "fixed" or "azimuth"
    angle: float = 0.0  # fixed thrusters only, rad
    f_max: float = 2.0
    rate_max: float = 10.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("fixed", "azimuth"):
            raise ConfigError(f"unknown thruster type '{self.kind}'")
        if not (self.f_max > 0 and self.rate_max > 0):
            raise ConfigError("thruster f_max and rate_max must be positive")

    @property
    def n_columns(self) -> int:
        return 2 if self.kind == "azimuth" else 1


def _column(lx, ly, beta):
    c, s = np.cos(beta), np.sin(beta)
    return np.array([c, s, lx * s - ly * c])


@dataclass
class ThrusterLayout:
    thrusters: list
    u_prev: np.ndarray = None  # last realised command, one entry per column

    def __post_init__(self):
        if not self.thrusters:
            raise ConfigError("layout needs at least one thruster")
        if self.u_prev is None:
            self.u_prev = np.zeros(self.n_columns)

    @property
    def n_columns(self) -> int:
        return sum(t.n_columns for t in self.thrusters)

    @property
    def f_max(self) -> np.ndarray:
        return np.concatenate([[t.f_max] * t.n_columns for t in self.thrusters])

    @property
    def rate_max(self) -> np.ndarray:
        return np.concatenate([[t.rate_max] * t.n_columns for t in self.thrusters])

    def column_names(self):
        names = []
        for i, t in enumerate(self.thrusters, start=1):
            if t.kind == "azimuth":
                names += [f"u_{i}x", f"u_{i}y"]
            else:
                names.append(f"u_{i}")
        return names

    def azimuth_angles(self, u) -> np.ndarray:
        """Azimuth angles atan2(F_y, F_x) for each azimuth thruster, for logging."""
        out, j = [], 0
        for t in self.thrusters:
            if t.kind == "azimuth":
                out.append(np.arctan2(u[j + 1], u[j]))
            j += t.n_columns
        return np.array(out)

    def azimuth_names(self):
        return [f"alpha_{i}" for i, t in enumerate(self.thrusters, start=1) if t.kind == "azimuth"]

    @classmethod
    def from_dicts(cls, items) -> "ThrusterLayout":
        return cls([Thruster(**d) for d in items])

    def capacity(self) -> np.ndarray:
        """Largest |tau_i| reachable per axis inside the force box."""
        return np.abs(config_matrix(self)) @ self.f_max


def config_matrix(layout: ThrusterLayout) -> np.ndarray:
    cols = []
    for t in layout.thrusters:
        if t.kind == "azimuth":
            cols.append(_column(t.x, t.y, 0.0))
            cols.append(_column(t.x, t.y, np.pi / 2))
        else:
            cols.append(_column(t.x, t.y, t.angle))
    B = np.column_stack(cols)
    # exact zeros keep pure-axis columns clean
    B[np.abs(B) < 1e-15] = 0.0
    if np.linalg.matrix_rank(B) < 3:
        raise UnderactuatedError("thruster configuration matrix has rank < 3")
    return B


@dataclass
class Allocation:
    u: np.ndarray
    u_star: np.ndarray
    tau_real: np.ndarray


def allocate(tau_cmd, layout: ThrusterLayout, dt, B=None) -> Allocation:
    """Minimum-norm allocation, then saturation, then rate limiting.

    Updates ``layout.u_prev`` with the realised command.
    """
    if B is None:
        B = config_matrix(layout)
    u_star = np.linalg.pinv(B) @ np.asarray(tau_cmd, dtype=float)
    f_max = layout.f_max
    u = np.clip(u_star, -f_max, f_max)
    step = layout.rate_max * dt
    u = np.clip(u, layout.u_prev - step, layout.u_prev + step)
    layout.u_prev = u.copy()
    return Allocation(u, u_star, B @ u)
