"""
Time-domain biphoton amplitudes for degenerate collinear type-II SPDC.

Bandwidths are FWHM values in Hz and enter the Gaussian spectral factors as
``exp(-D (nu/sigma)**2)`` with ``D = 4 ln 2``, without any 2*pi conversion.
Amplitudes carry no normalization constant (see :mod:`noonabs.absorption`).
All functions broadcast over NumPy arrays of detection times.
"""

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .dispersion import BBO, CrystalDispersion, velocity_bundle
from .errors import DegenerateVelocityError, DomainError
from .numerics import erf_diff

D = 4.0 * math.log(2.0)
SQRT_D = math.sqrt(D)


@dataclass(frozen=True)
class SetupParams:
    """Experimental knobs. SI units: Hz for bandwidths, metres for ``length``."""

    sigma_e: float
    sigma_o: float
    sigma_p: float
    length: float
    kappa_f: float
    lambda_pump: float = 0.4  # microns
    crystal: CrystalDispersion = field(default=BBO, compare=True)

    def __post_init__(self):
        for name in ("sigma_e", "sigma_o", "length", "kappa_f", "lambda_pump"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if not (np.isfinite(self.sigma_p) and self.sigma_p >= 0):
            raise DomainError(f"sigma_p must be non-negative, got {self.sigma_p}")

    @cached_property
    def velocities(self):
        return velocity_bundle(self.lambda_pump, self.crystal)

    @property
    def omega_daughter(self):
        """Angular centre frequency of each daughter photon (rad/s)."""
        return 2.0 * math.pi * SPEED_OF_LIGHT / (2.0 * self.lambda_pump * 1e-6)

    def with_(self, **changes):
        return replace(self, **changes)

    def require_pulsed(self):
        if not self.sigma_p > 0:
            raise DomainError("pulsed formulas need sigma_p > 0; use the cw path")

    def as_dict(self):
        """CLI units: Hz, millimetres, microns."""
        return {
            "sigma_e": self.sigma_e,
            "sigma_o": self.sigma_o,
            "sigma_p": self.sigma_p,
            "length_mm": self.length * 1e3,
            "kappa_f": self.kappa_f,
            "lambda_pump": self.lambda_pump,
            "crystal": self.crystal.name,
        }


@dataclass(frozen=True)
class AmplitudeKernelConstants:
    P_U: float
    E_U: float
    O_U: float
    U: float
    l: float
    sqrt_bandwidth_sum: float  # sqrt(sigma_e^2 + sigma_o^2 + sigma_p^2)
    prefactor: float
    sigma_e: float
    sigma_o: float
    sigma_p: float
    D: float = D

    @classmethod
    def from_setup(cls, setup):
        setup.require_pulsed()
        v = setup.velocities
        v.require_walkoff()
        se, so, sp = setup.sigma_e, setup.sigma_o, setup.sigma_p
        P_U = v.U_p * (v.U_e - v.U_o) * se * so
        E_U = v.U_e * (v.U_p - v.U_o) * sp * so
        O_U = v.U_o * (v.U_e - v.U_p) * se * sp
        U = math.sqrt(P_U**2 + E_U**2 + O_U**2)
        if U == 0.0:
            raise DegenerateVelocityError("velocity-bandwidth combination U vanishes")
        root = math.sqrt(se**2 + so**2 + sp**2)
        ell = setup.length * U / (2.0 * v.U_e * v.U_o * v.U_p * SQRT_D * root)
        pref = v.U_e * v.U_o * v.U_p * se * so * sp / (U * SQRT_D)
        return cls(P_U, E_U, O_U, U, ell, root, pref, se, so, sp)

    def T(self, t1, t2):
        """Dimensionless error-function argument for detection times (s)."""
        num = ((t1 - t2) * (self.P_U / self.U) * self.sigma_e * self.sigma_o
               + t1 * (self.E_U / self.U) * self.sigma_o * self.sigma_p
               - t2 * (self.O_U / self.U) * self.sigma_e * self.sigma_p)
        return num / (2.0 * SQRT_D * self.sqrt_bandwidth_sum)

    def gaussian_exponent(self, t1, t2):
        """Non-negative ``x`` in the envelope ``exp(-x)``."""
        lin = (t1 * (self.O_U / self.U) * self.sigma_o
               + t2 * (self.E_U / self.U) * self.sigma_e)
        return lin * lin / (4.0 * D)


def _phase(t1, t2, setup):
    # degenerate: Omega_e == Omega_o
    return np.exp(-1j * setup.omega_daughter * (t1 + t2))


def amplitude_script_a(t1, t2, setup, kernel=None):
    """Amplitude for SPDC followed by the polarizing beam splitter and filters."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    k = kernel or AmplitudeKernelConstants.from_setup(setup)
    T = k.T(t1, t2)
    bracket = erf_diff(T, T + k.l)
    out = _phase(t1, t2, setup) * np.exp(-k.gaussian_exponent(t1, t2)) * k.prefactor * bracket
    return out[()] if out.ndim == 0 else out


def amplitude_full(t1, t2, setup, kernel=None):
    """Symmetrized amplitude after the 50:50 beam splitter."""
    k = kernel or AmplitudeKernelConstants.from_setup(setup)
    return amplitude_script_a(t1, t2, setup, k) + amplitude_script_a(t2, t1, setup, k)


def rect(x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.where(ax < 0.5, 1.0, np.where(ax == 0.5, 0.5, 0.0))
    return out[()] if out.ndim == 0 else out


def nofilter_window(t1, t2, setup):
    """Rect-window arguments ``(A, B, J)`` of the unfiltered amplitude."""
    v = setup.velocities
    v.require_walkoff()
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    dU = v.U_e - v.U_o
    A = ((t1 - t2) * v.U_e * v.U_o + 0.5 * setup.length * dU) / (2.0 * v.U_e * v.U_o * SQRT_D)
    B = setup.length * dU / (2.0 * v.U_e * v.U_o * SQRT_D)
    lin = t1 * v.U_o * (v.U_e - v.U_p) + t2 * v.U_e * (v.U_p - v.U_o)
    # 4D here, the sigma -> infinity limit of the filtered envelope
    J = lin**2 / (4.0 * D * dU**2 * v.U_p**2)
    return A, B, J


def nofilter_prefactor(setup):
    """Limit of the filtered amplitude's prefactor as sigma_e, sigma_o -> infinity."""
    v = setup.velocities
    return v.U_e * v.U_o * setup.sigma_p / ((v.U_e - v.U_o) * SQRT_D)


def amplitude_nofilter_limit(t1, t2, setup):
    """``-2 K exp(-sigma_p^2 J) Rect(A/B)`` times the common phase."""
    setup.require_pulsed()
    A, B, J = nofilter_window(t1, t2, setup)
    out = (-2.0 * nofilter_prefactor(setup) * _phase(np.asarray(t1, float), np.asarray(t2, float), setup)
           * np.exp(-setup.sigma_p**2 * J) * rect(A / B))
    return out[()] if np.ndim(out) == 0 else out


def cw_bandwidth(setup):
    """Combined filter bandwidth ``sigma_e sigma_o / sqrt(sigma_e^2 + sigma_o^2)``."""
    return setup.sigma_e * setup.sigma_o / math.hypot(setup.sigma_e, setup.sigma_o)


def amplitude_cw(t1, t2, setup):
    """Stationary amplitude for a continuous-wave pump; ``sigma_p`` is ignored."""
    v = setup.velocities
    v.require_walkoff()
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    sig = cw_bandwidth(setup)
    dt = t1 - t2
    scale = sig / (2.0 * SQRT_D)
    bracket = erf_diff(scale * dt, scale * (dt - setup.length * v.u))
    out = _phase(t1, t2, setup) * bracket / (v.U_e - v.U_o)
    return out[()] if out.ndim == 0 else out


def amplitude_grid(t_min, t_max, points, setup, full=True):
    """``|A|`` on a square grid. Returns ``(times, magnitude)`` with
    ``magnitude[i, j] = |A(times[i], times[j])|``."""
    if points < 2 or not t_max > t_min:
        raise DomainError("need t_max > t_min and at least two points")
    times = np.linspace(t_min, t_max, points)
    t1, t2 = np.meshgrid(times, times, indexing="ij")
    fn = amplitude_full if full else amplitude_script_a
    return times, np.abs(fn(t1, t2, setup))
