"""Reduced-order 6-DOF vessel model.

The hull is a uniform rectangular prism; every model matrix is derived from its
dimensions and a handful of scaling factors. All matrices are diagonal except
the Coriolis-centripetal terms, which are built from the mass matrix.

Conventions: pose ``eta = [x, y, z, phi, theta, psi]`` in the world (NED) frame,
body velocity ``nu = [u, v, w, p, q, r]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelConfigError, ParameterError, SingularityError

GRAVITY = 9.81
PITCH_GUARD = np.deg2rad(87.0)

# surge, sway, heave, roll, pitch, yaw
DEFAULT_ADDED_MASS = (0.2, 1.0, 1.0, 1.0, 0.5, 0.5)
DEFAULT_DAMPING_RATIO = 0.1  # heave/roll/pitch
DEFAULT_TIME_CONSTANT = 5.0  # surge/sway/yaw, seconds

PLANAR = (0, 1, 5)
RESTORED = (2, 3, 4)
ANGLES = (3, 4, 5)


def wrap_angle(a):
    """Wrap angle(s) to (-pi, pi]; in-range values are returned untouched."""
    a = np.asarray(a, dtype=float)
    inside = (a > -np.pi) & (a <= np.pi)
    out = np.where(inside, a, np.pi - np.mod(np.pi - a, 2.0 * np.pi))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class VesselParams:
    """Hull description for the prism model.

    ``damping`` and the metacentric heights default to ``None`` which means
    "derive from the hull" (see :func:`build_matrices`).
    """

    L: float
    B: float
    T: float
    rho: float = 1000.0
    added_mass: tuple = DEFAULT_ADDED_MASS
    damping: tuple | None = None
    GM_T: float | None = None
    GM_L: float | None = None
    current: tuple = (0.0,) * 6
    damping_ratio: float = DEFAULT_DAMPING_RATIO
    time_constant: float = DEFAULT_TIME_CONSTANT

    def __post_init__(self):
        for name in ("L", "B", "T", "rho"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ParameterError(f"{name} must be positive, got {val}")
        alpha = np.asarray(self.added_mass, dtype=float)
        if alpha.shape != (6,) or np.any(alpha < 0) or not np.all(np.isfinite(alpha)):
            raise ParameterError("added_mass must be 6 non-negative factors")
        if self.damping is not None:
            d = np.asarray(self.damping, dtype=float)
            if d.shape != (6,) or np.any(d < 0) or not np.all(np.isfinite(d)):
                raise ParameterError("damping must be 6 non-negative coefficients")
        if np.asarray(self.current, dtype=float).shape != (6,):
            raise ParameterError("current must have 6 components")
        if self.damping_ratio < 0 or self.time_constant <= 0:
            raise ParameterError("damping_ratio must be >= 0 and time_constant > 0")

    @property
    def mass(self) -> float:
        return self.rho * self.L * self.B * self.T

    @property
    def displacement(self) -> float:
        return self.L * self.B * self.T

    @property
    def gm_t(self) -> float:
        # uniform box: KB = KG = T/2, so GM_T = BM_T = B^2 / (12 T)
        return self.B**2 / (12.0 * self.T) if self.GM_T is None else self.GM_T

    @property
    def gm_l(self) -> float:
        return self.L**2 / (12.0 * self.T) if self.GM_L is None else self.GM_L

    @property
    def nu_c(self) -> np.ndarray:
        return np.asarray(self.current, dtype=float)

    @classmethod
    def from_dict(cls, cfg: dict) -> "VesselParams":
        keys = {
            "L", "B", "T", "rho", "added_mass", "damping", "GM_T", "GM_L",
            "current", "damping_ratio", "time_constant",
        }
        unknown = set(cfg) - keys
        if unknown:
            raise ParameterError(f"unknown vessel keys: {sorted(unknown)}")
        kw = dict(cfg)
        for k in ("added_mass", "damping", "current"):
            if kw.get(k) is not None:
                kw[k] = tuple(float(x) for x in kw[k])
        return cls(**kw)


@dataclass(frozen=True)
class ModelMatrices:
    M_RB: np.ndarray
    M_A: np.ndarray
    D: np.ndarray
    G: np.ndarray
    M: np.ndarray = field(init=False, repr=False)
    M_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        M = self.M_RB + self.M_A
        if not np.all(np.isfinite(M)) or np.linalg.cond(M) > 1e12:
            raise ModelConfigError("mass matrix M_RB + M_A is singular")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "M_inv", np.linalg.inv(M))

    def planar(self):
        """(M, D) restricted to surge, sway and yaw."""
        idx = np.ix_(PLANAR, PLANAR)
        return self.M[idx].copy(), self.D[idx].copy()


def build_matrices(params: VesselParams) -> ModelMatrices:
    """Build M_RB, M_A, D and the restoring stiffness G for the prism hull."""
    m = params.mass
    L, B, T = params.L, params.B, params.T
    Ix = m * (B**2 + T**2) / 12.0
    Iy = m * (L**2 + T**2) / 12.0
    Iz = m * (L**2 + B**2) / 12.0
    rb = np.array([m, m, m, Ix, Iy, Iz])
    ma = np.asarray(params.added_mass, dtype=float) * rb

    g = np.zeros(6)
    g[2] = params.rho * GRAVITY * L * B
    g[3] = params.rho * GRAVITY * params.displacement * params.gm_t
    g[4] = params.rho * GRAVITY * params.displacement * params.gm_l

    if params.damping is not None:
        d = np.asarray(params.damping, dtype=float)
    else:
        mt = rb + ma
        d = mt / params.time_constant
        for i in RESTORED:
            d[i] = 2.0 * params.damping_ratio * np.sqrt(mt[i] * g[i])
    return ModelMatrices(np.diag(rb), np.diag(ma), np.diag(d), np.diag(g))


def skew(a) -> np.ndarray:
    """Cross-product matrix: skew(a) @ b == cross(a, b)."""
    return np.array([
        [0.0, -a[2], a[1]],
        [a[2], 0.0, -a[0]],
        [-a[1], a[0], 0.0],
    ])


def rotation(phi, theta, psi) -> np.ndarray:
    """Body-to-world rotation, zyx convention."""
    cphi, sphi = np.cos(phi), np.sin(phi)
    cth, sth = np.cos(theta), np.sin(theta)
    cpsi, spsi = np.cos(psi), np.sin(psi)
    return np.array([
        [cpsi * cth, -spsi * cphi + cpsi * sth * sphi, spsi * sphi + cpsi * cphi * sth],
        [spsi * cth, cpsi * cphi + sphi * sth * spsi, -cpsi * sphi + sth * spsi * cphi],
        [-sth, cth * sphi, cth * cphi],
    ])


def transform_J(eta) -> np.ndarray:
    """Kinematic transform mapping body velocity ``nu`` to pose rate ``eta_dot``."""
    phi, theta, psi = eta[3], eta[4], eta[5]
    if abs(theta) >= PITCH_GUARD:
        raise SingularityError(f"pitch {np.rad2deg(theta):.2f} deg too close to +-90 deg")
    cphi, sphi = np.cos(phi), np.sin(phi)
    cth, tth = np.cos(theta), np.tan(theta)
    Tmat = np.array([
        [1.0, sphi * tth, cphi * tth],
        [0.0, cphi, -sphi],
        [0.0, sphi / cth, cphi / cth],
    ])
    J = np.zeros((6, 6))
    J[:3, :3] = rotation(phi, theta, psi)
    J[3:, 3:] = Tmat
    return J


def coriolis(M, nu) -> np.ndarray:
    """Coriolis-centripetal matrix from a symmetric mass matrix.

    Uses the two-block form
    ``C = [[0, -S(M11 v + M12 w)], [-S(M11 v + M12 w), -S(M21 v + M22 w)]]``
    which is skew-symmetric, so ``x @ C @ x == 0`` for every x.
    """
    M = np.asarray(M, dtype=float)
    v, w = nu[:3], nu[3:]
    p = M[:3, :3] @ v + M[:3, 3:] @ w
    h = M[3:, :3] @ v + M[3:, 3:] @ w
    Sp = skew(p)
    C = np.zeros((6, 6))
    C[:3, 3:] = -Sp
    C[3:, :3] = -Sp
    C[3:, 3:] = -skew(h)
    return C


@dataclass(frozen=True)
class VesselState:
    eta: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float).reshape(6))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float).reshape(6))

    @classmethod
    def zero(cls) -> "VesselState":
        return cls(np.zeros(6), np.zeros(6))

    @classmethod
    def from_vector(cls, x) -> "VesselState":
        return cls(x[:6], x[6:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.eta, self.nu])

    def wrapped(self) -> "VesselState":
        eta = self.eta.copy()
        eta[3:] = wrap_angle(eta[3:])
        return VesselState(eta, self.nu)


def eom_rhs(state: VesselState, tau, mats: ModelMatrices, nu_c=None):
    """Right-hand side of the equations of motion.

    Returns ``(eta_dot, nu_dot)``. Restoring acts as ``-G @ eta`` (stabilising).
    """
    eta, nu = state.eta, state.nu
    nu_r = nu if nu_c is None else nu - nu_c
    tau = np.asarray(tau, dtype=float)
    eta_dot = transform_J(eta) @ nu
    load = (
        tau
        - coriolis(mats.M_RB, nu) @ nu_r
        - coriolis(mats.M_A, nu_r) @ nu_r
        - mats.D @ nu_r
        - mats.G @ eta
    )
    return eta_dot, mats.M_inv @ load


def embed_planar(tau3) -> np.ndarray:
    """Place a surge/sway/yaw load vector into the 6-DOF load vector."""
    tau = np.zeros(6)
    tau[list(PLANAR)] = tau3
    return tau
