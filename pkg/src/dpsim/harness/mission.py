"""Setpoint missions and the hold-condition supervisor."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dynamics import wrap_angle
from ..errors import ConfigError


def four_corner_mission(box: float = 1.0, yaw: float = np.deg2rad(45.0)) -> list:
    """Poses of the 4-corner test, starting and ending at the origin.

    Order: surge, sway, yaw rotation, combined diagonal return, yaw back.
    """
    if box < 0:
        raise ConfigError("box size must be non-negative")
    return [
        np.array([0.0, 0.0, 0.0]),
        np.array([box, 0.0, 0.0]),
        np.array([box, -box, 0.0]),
        np.array([box, -box, -yaw]),
        np.array([0.0, 0.0, -yaw]),
        np.array([0.0, 0.0, 0.0]),
    ]


@dataclass(frozen=True)
class HoldCondition:
    pos_tol: float = 0.02
    yaw_tol: float = np.deg2rad(1.0)
    speed_tol: float = 0.01
    hold_time: float = 2.0

    def satisfied(self, eta3, speed, target) -> bool:
        e = np.hypot(eta3[0] - target[0], eta3[1] - target[1])
        return (
            e < self.pos_tol
            and abs(wrap_angle(eta3[2] - target[2])) < self.yaw_tol
            and speed < self.speed_tol
        )


class MissionSupervisor:
    """Advances through setpoints once each hold condition has held long enough.

    ``index`` is the active setpoint; ``advance_times[i]`` is when setpoint ``i``
    was completed.
    """

    def __init__(self, setpoints, hold: HoldCondition | None = None):
        if len(setpoints) == 0:
            raise ConfigError("mission needs at least one setpoint")
        self.setpoints = [np.asarray(s, dtype=float) for s in setpoints]
        self.hold = hold or HoldCondition()
        self.index = 0
        self.advance_times = []
        self._since = None

    @property
    def complete(self) -> bool:
        return self.index >= len(self.setpoints)

    @property
    def target(self):
        return self.setpoints[min(self.index, len(self.setpoints) - 1)]

    def update(self, t, eta3, speed) -> bool:
        """Feed one sample; returns True once the whole mission is complete."""
        if self.complete:
            return True
        if self.hold.satisfied(eta3, speed, self.target):
            if self._since is None:
                self._since = t
            if t - self._since >= self.hold.hold_time - 1e-9:
                self.advance_times.append(t)
                self.index += 1
                self._since = None
        else:
            self._since = None
        return self.complete
