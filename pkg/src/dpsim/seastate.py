"""Wave spectra, harmonic sea-surface realisations and a simple wave load.

Pierson-Moskowitz in the (H_s, omega_p) form::

    S_PM(w) = 5/16 * Hs^2 * wp^4 * w^-5 * exp(-1.25 (wp / w)^4)

JONSWAP multiplies by ``A_gamma * gamma ** exp(-(w - wp)^2 / (2 sigma^2 wp^2))``
with sigma = 0.07 below the peak and 0.09 above, and the normalisation
``A_gamma = 1 - 0.287 ln(gamma)`` (an approximation that keeps H_s close to the
requested value).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import GRAVITY
from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class SpectrumParams:
    hs: float = 0.05
    tp: float = 1.5
    gamma: float = 3.3
    n: int = 200
    w_min: float | None = None  # default 0.2 * wp
    w_max: float | None = None  # default 5 * wp

    def __post_init__(self):
        if not self.hs > 0:
            raise ParameterError("hs must be positive")
        if not self.tp > 0:
            raise ParameterError("tp must be positive")
        if not self.gamma >= 1:
            raise ParameterError("gamma must be >= 1")
        if self.n < 2:
            raise ParameterError("n must be >= 2")
        lo, hi = self.band
        if not 0 < lo < hi:
            raise ParameterError("need 0 < w_min < w_max")

    @property
    def wp(self) -> float:
        return 2.0 * np.pi / self.tp

    @property
    def band(self):
        lo = 0.2 * self.wp if self.w_min is None else self.w_min
        hi = 5.0 * self.wp if self.w_max is None else self.w_max
        return lo, hi

    def grid(self) -> np.ndarray:
        lo, hi = self.band
        return np.linspace(lo, hi, self.n)


def pierson_moskowitz(hs, tp, w):
    w = _check_omega(w)
    wp = 2.0 * np.pi / tp
    return 5.0 / 16.0 * hs**2 * wp**4 * w**-5 * np.exp(-1.25 * (wp / w) ** 4)


def jonswap(hs, tp, gamma, w):
    w = _check_omega(w)
    wp = 2.0 * np.pi / tp
    sigma = np.where(w <= wp, 0.07, 0.09)
    peak = gamma ** np.exp(-((w - wp) ** 2) / (2.0 * sigma**2 * wp**2))
    a_gamma = 1.0 - 0.287 * np.log(gamma)
    return a_gamma * pierson_moskowitz(hs, tp, w) * peak


def spectrum_density(params: SpectrumParams, w):
    """Spectral density S(w) in m^2 s for the given parameters."""
    return jonswap(params.hs, params.tp, params.gamma, w)


def _check_omega(w):
    w = np.asarray(w, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("spectrum is defined for w > 0 only")
    return w


def spectral_moment(params: SpectrumParams, order=0, n=2000, band=None):
    """Trapezoidal spectral moment m_k over ``band`` (default [0.2 wp, 6 wp])."""
    lo, hi = band if band is not None else (0.2 * params.wp, 6.0 * params.wp)
    w = np.linspace(lo, hi, n)
    return np.trapezoid(w**order * spectrum_density(params, w), w)


@dataclass(frozen=True)
class WaveRealization:
    amplitudes: np.ndarray
    frequencies: np.ndarray
    phases: np.ndarray
    seed: int | None = None

    @property
    def wavenumbers(self) -> np.ndarray:
        # deep water dispersion
        return self.frequencies**2 / GRAVITY


def realize(params: SpectrumParams, seed=None) -> WaveRealization:
    """Random-phase harmonic realisation on a uniform frequency grid."""
    w = params.grid()
    dw = w[1] - w[0]
    amp = np.sqrt(2.0 * spectrum_density(params, w) * dw)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=w.size)
    return WaveRealization(amp, w, phases, seed)


def elevation(real: WaveRealization, t):
    """Surface elevation at the origin; ``t`` may be scalar or array."""
    t = np.asarray(t, dtype=float)
    arg = np.multiply.outer(t, real.frequencies) + real.phases
    return np.cos(arg) @ real.amplitudes


def wave_slope(real: WaveRealization, t):
    """Surface slope d(eta_w)/dx at the origin for waves travelling along +x."""
    t = np.asarray(t, dtype=float)
    arg = np.multiply.outer(t, real.frequencies) + real.phases
    return np.sin(arg) @ (real.amplitudes * real.wavenumbers)


def wave_load(real: WaveRealization, gain, t) -> np.ndarray:
    """Surge/sway/yaw disturbance ``gain * slope(t)``.

    The slope is a first-order proxy for wave excitation; ``gain`` (N, N, N m
    per unit slope) encodes heading and hull response.
    """
    gain = np.asarray(gain, dtype=float)
    return gain * wave_slope(real, t)
