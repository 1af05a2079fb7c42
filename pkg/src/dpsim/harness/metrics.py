"""Tracking-error metrics for stationkeeping runs."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import wrap_angle
from ..errors import AlignmentError, EmptyWindowError


@dataclass
class MetricsReport:
    position_rmse: float
    yaw_rmse_deg: float
    velocity_rmse: float
    n_samples: int
    window_start: float
    segments: dict = field(default_factory=dict)
    settling_times: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_flat(self) -> dict:
        out = {
            "position_rmse_m": self.position_rmse,
            "yaw_rmse_deg": self.yaw_rmse_deg,
            "velocity_rmse_mps": self.velocity_rmse,
            "n_samples": self.n_samples,
            "window_start_s": self.window_start,
        }
        for seg, vals in self.segments.items():
            for k, v in vals.items():
                out[f"segment_{seg}_{k}"] = v
        for seg, v in self.settling_times.items():
            out[f"settling_time_{seg}_s"] = v
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_flat(), sort_keys=True, indent=2) + "\n"


def _rms(x) -> float:
    return float(np.sqrt(np.mean(np.square(x)))) if len(x) else 0.0


def compute_metrics(t, pose, vel, ref_pose, ref_vel, start=0, segment=None) -> MetricsReport:
    """RMS tracking errors over samples ``start:``.

    ``pose``/``ref_pose`` are (N, 3) arrays of (x, y, psi); ``vel``/``ref_vel``
    are (N, 2) or (N, 3) world-frame rates (only x, y are used). ``segment`` is
    an optional per-sample label for per-segment breakdowns.
    """
    t = np.asarray(t, dtype=float)
    arrays = [np.asarray(a, dtype=float) for a in (pose, vel, ref_pose, ref_vel)]
    n = len(t)
    if any(len(a) != n for a in arrays) or (segment is not None and len(segment) != n):
        raise AlignmentError("trajectory and reference lengths differ")
    pose, vel, ref_pose, ref_vel = arrays
    sl = slice(start, None)
    if n - start <= 0:
        raise EmptyWindowError("metric evaluation window is empty")
    pos_err = np.hypot(pose[sl, 0] - ref_pose[sl, 0], pose[sl, 1] - ref_pose[sl, 1])
    yaw_err = wrap_angle(pose[sl, 2] - ref_pose[sl, 2])
    vel_err = np.hypot(vel[sl, 0] - ref_vel[sl, 0], vel[sl, 1] - ref_vel[sl, 1])
    segments = {}
    if segment is not None:
        seg = np.asarray(segment)[sl]
        for s in np.unique(seg):
            m = seg == s
            segments[int(s)] = {
                "position_rmse_m": _rms(pos_err[m]),
                "yaw_rmse_deg": float(np.rad2deg(_rms(yaw_err[m]))),
                "velocity_rmse_mps": _rms(vel_err[m]),
            }
    return MetricsReport(
        position_rmse=_rms(pos_err),
        yaw_rmse_deg=float(np.rad2deg(_rms(yaw_err))),
        velocity_rmse=_rms(vel_err),
        n_samples=int(n - start),
        window_start=float(t[start]),
        segments=segments,
    )
