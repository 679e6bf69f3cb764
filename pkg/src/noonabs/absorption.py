"""
Two-photon absorption of the SPDC-generated |2::0> state.

Pulsed probability::

    P2 = C''/(L sigma_p) * Int dnu exp(-G nu^2) |Erf(i a nu) - Erf(i a nu - ell)|^2
                                 / (1 + 4 (nu/kappa_f)^2)

The bracket grows like ``exp(2 a^2 nu^2)``; it is evaluated through
:func:`~noonabs.numerics.erf_window_scaled`, and ``G - 2 a^2`` (always
``2D (1/(sigma_e^2+sigma_o^2) + 1/sigma_p^2)`` for physical inputs) is the
exponent actually integrated. The atomic response is a unit constant.

The unfiltered closed form, the cw rate and the fair coherent comparison live
here as well, together with the state normalizations.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .biphoton import D, SQRT_D, SetupParams, cw_bandwidth
from .errors import DivergenceError, DomainError
from .numerics import (
    DEFAULT_REL_TOL,
    bessel_k0_scaled,
    erf_window_scaled,
    integrate_interval,
    integrate_line,
    truncation_radius,
)

# Prefactor of the pulsed probability, up to the 1/U_2 velocity factor.
C_DOUBLE_PRIME_NUMERIC = 8.0 * (1.0 + math.sqrt(math.pi)) ** 2 * math.sqrt(2.0 * math.pi**7 * D)

REFERENCE_SETUP = SetupParams(
    sigma_e=1e13, sigma_o=1e13, sigma_p=1e9, length=2.3e-3, kappa_f=1e14
)


@dataclass(frozen=True)
class AbsorptionKernel:
    """Constants of the pulsed integrand. The slope is ``E = i * erf_slope``."""

    erf_slope: float
    ell: float
    c_double_prime: float
    gaussian_coeffs: tuple
    kappa_f: float

    @classmethod
    def from_setup(cls, setup):
        setup.require_pulsed()
        v = setup.velocities
        v.require_walkoff()
        se, so, sp = setup.sigma_e, setup.sigma_o, setup.sigma_p
        U2, ue = v.U_2, v.u_e
        s2 = se * se + so * so
        slope = SQRT_D * (U2 * so**2 + ue * s2) / (U2 * se * so * math.sqrt(s2))
        ell = setup.length * U2 * se * so / (2.0 * math.sqrt(D * s2))
        coeffs = (
            2.0 * D * (ue + U2) ** 2 / (se**2 * U2**2),
            2.0 * D * ue**2 / (so**2 * U2**2),
            2.0 * D / sp**2,
        )
        return cls(slope, ell, C_DOUBLE_PRIME_NUMERIC / U2, coeffs, setup.kappa_f)

    @property
    def gaussian(self):
        return math.fsum(self.gaussian_coeffs)

    @property
    def growth(self):
        return 2.0 * self.erf_slope**2

    @property
    def decay(self):
        """Net Gaussian coefficient after the bracket's growth is divided out."""
        return self.gaussian - self.growth

    def check_convergence(self):
        if not self.decay > 1e-12 * self.gaussian:
            raise DivergenceError(
                f"Gaussian decay {self.gaussian:.6e} does not dominate error-function "
                f"growth {self.growth:.6e}",
                decay=self.gaussian, growth=self.growth,
            )

    def integrand(self, nu, lorentzian=True):
        nu = np.asarray(nu, dtype=float)
        bracket = np.abs(erf_window_scaled(self.erf_slope * nu, self.ell)) ** 2
        out = np.exp(-self.decay * nu * nu) * bracket
        if lorentzian:
            out = out / (1.0 + 4.0 * (nu / self.kappa_f) ** 2)
        return out


@dataclass(frozen=True)
class AbsorptionResult:
    raw: float
    normalized: float
    quadrature_error: float
    params: SetupParams
    kind: str = "pulsed"
    evaluations: int = 0

    def scaled(self, reference):
        return self.raw / reference.raw

    def as_dict(self, reference=None):
        out = {
            "kind": self.kind,
            "raw": self.raw,
            "normalized": self.normalized,
            "error_estimate": self.quadrature_error,
            "params": self.params.as_dict(),
        }
        if reference is not None:
            out["scaled"] = self.scaled(reference)
        return out


@dataclass(frozen=True)
class CoherentComparison:
    intensity: float
    gamma: float
    p2_alpha: float
    noon_p2: float
    quadrature_error: float
    params: SetupParams = field(repr=False)

    @property
    def ratio_to_noon(self):
        return self.p2_alpha / self.noon_p2

    def as_dict(self):
        return {
            "kind": "coherent",
            "intensity": self.intensity,
            "gamma": self.gamma,
            "p2_alpha": self.p2_alpha,
            "noon_p2": self.noon_p2,
            "ratio_to_noon": self.ratio_to_noon,
            "error_estimate": self.quadrature_error,
            "params": self.params.as_dict(),
        }


def _lorentzian_breakpoints(kappa_f, radius):
    half = 0.5 * kappa_f
    pts = [0.0]
    x = half
    while x < radius:
        pts.extend((-x, x))
        x *= 10.0
    return pts


def normalization_pulsed(setup):
    """State normalization C for a pulsed pump."""
    setup.require_pulsed()
    v = setup.velocities
    v.require_walkoff()
    return ((D / 2.0) ** 0.25 * math.sqrt(v.U_e * v.U_o * (v.U_e - v.U_o))
            / (math.pi**0.75 * math.sqrt(setup.length * setup.sigma_p)))


def normalization_cw(setup):
    v = setup.velocities
    v.require_walkoff()
    return math.sqrt(v.U_e * v.U_o * (v.U_e - v.U_o) / (2.0 * math.pi * setup.length))


def p2_pulsed(setup, rel_tol=DEFAULT_REL_TOL, lorentzian=True):
    """Two-photon absorption probability for a pulsed pump.

    ``raw`` carries the C''/(L sigma_p) prefactor; ``normalized`` multiplies
    in C**2. ``lorentzian=False`` drops the final-state line shape.

    Raises
    ------
    DivergenceError
        If the Gaussian envelope does not beat the error-function growth.
    QuadratureError
        If the adaptive quadrature cannot reach ``rel_tol``.
    """
    kernel = AbsorptionKernel.from_setup(setup)
    kernel.check_convergence()
    scale = 1.0 / math.sqrt(kernel.decay)
    radius = truncation_radius(scale, rel_tol)
    bps = _lorentzian_breakpoints(setup.kappa_f, radius) if lorentzian else ()
    q = integrate_line(lambda nu: kernel.integrand(nu, lorentzian), scale, rel_tol,
                       breakpoints=bps)
    pref = kernel.c_double_prime / (setup.length * setup.sigma_p)
    raw = float(pref * q.value)
    return AbsorptionResult(
        raw=raw,
        normalized=raw * normalization_pulsed(setup) ** 2,
        quadrature_error=float(pref * q.abs_error_estimate),
        params=setup,
        kind="pulsed",
        evaluations=q.evaluations,
    )


def _nofilter_argument(setup):
    return D * setup.kappa_f**2 / (8.0 * setup.sigma_p**2)


def p2_nofilter_limit(setup):
    """Closed-form unfiltered probability ``C'' kf e^x K0(x) / (2 L sigma_p)``,
    ``x = D kf^2 / (8 sigma_p^2)``; ``e^x K0(x)`` is evaluated as one factor."""
    setup.require_pulsed()
    v = setup.velocities
    v.require_walkoff()
    c2 = C_DOUBLE_PRIME_NUMERIC / v.U_2
    x = _nofilter_argument(setup)
    return c2 * setup.kappa_f / (2.0 * setup.length * setup.sigma_p) * float(bessel_k0_scaled(x))


def p2_nofilter_exact(setup):
    """Unfiltered limit of :func:`p2_pulsed` integrated in closed form.

    With sigma_e, sigma_o -> infinity the bracket tends to 1 and the integral
    of ``exp(-2D nu^2/sigma_p^2) / (1 + 4 nu^2/kf^2)`` is
    ``(pi kf / 2) erfcx(kf sqrt(D/2) / sigma_p)``.
    """
    setup.require_pulsed()
    v = setup.velocities
    v.require_walkoff()
    c2 = C_DOUBLE_PRIME_NUMERIC / v.U_2
    y = setup.kappa_f * math.sqrt(D / 2.0) / setup.sigma_p
    return c2 / (setup.length * setup.sigma_p) * 0.5 * math.pi * setup.kappa_f * float(special.erfcx(y))


def w2_cw(setup):
    """Continuous-wave rate ``(1/L) |Erf(L u sigma / (2 sqrt D))|^2``."""
    v = setup.velocities
    v.require_walkoff()
    sig = cw_bandwidth(setup)
    arg = setup.length * v.u * sig / (2.0 * SQRT_D)
    raw = float(special.erf(arg)) ** 2 / setup.length
    return AbsorptionResult(
        raw=raw,
        normalized=raw * normalization_cw(setup) ** 2,
        quadrature_error=0.0,
        params=setup,
        kind="cw",
        evaluations=0,
    )


@dataclass(frozen=True)
class CoherentKernel:
    erf_slope: float  # E_alpha = i * erf_slope
    ell: float
    gaussian: float
    kappa_f: float

    @classmethod
    def from_setup(cls, setup):
        setup.require_pulsed()
        v = setup.velocities
        v.require_walkoff()
        uo, ue, sp = v.u_o, v.u_e, setup.sigma_p
        if uo == 0.0:
            raise DomainError("u_o vanishes; coherent spectral profile undefined")
        slope = SQRT_D * (uo - ue) / (math.sqrt(2.0) * uo * sp)
        ell = setup.length * uo * sp / math.sqrt(2.0 * D)
        gaussian = D * (uo - ue) ** 2 / (uo**2 * sp**2)
        return cls(slope, ell, gaussian, setup.kappa_f)

    @property
    def growth(self):
        return 2.0 * self.erf_slope**2

    @property
    def decay(self):
        # the two coefficients agree analytically; keep only a genuine surplus
        d = self.gaussian - self.growth
        return d if d > 1e-12 * self.gaussian else 0.0

    def check_convergence(self):
        if self.gaussian - self.growth < -1e-12 * self.gaussian:
            raise DivergenceError(
                f"coherent integrand diverges: Gaussian {self.gaussian:.6e} < "
                f"growth {self.growth:.6e}",
                decay=self.gaussian, growth=self.growth,
            )

    def integrand(self, nu):
        """Integrand with the line shape, as a function of detuning ``nu``."""
        nu = np.asarray(nu, dtype=float)
        # |Erf(i a nu) - Erf(i a nu + ell)| = e^{a^2 nu^2} |F(-a nu, ell)|
        bracket = np.abs(erf_window_scaled(-self.erf_slope * nu, self.ell)) ** 2
        return np.exp(-self.decay * nu * nu) * bracket / (1.0 + 4.0 * (nu / self.kappa_f) ** 2)

    def integrand_angle(self, theta):
        """Same integral after ``nu = (kf/2) tan(theta)``, which absorbs the line shape."""
        nu = 0.5 * self.kappa_f * np.tan(theta)
        bracket = np.abs(erf_window_scaled(-self.erf_slope * nu, self.ell)) ** 2
        return 0.5 * self.kappa_f * np.exp(-self.decay * nu * nu) * bracket


def coherent_gamma(setup, intensity):
    v = setup.velocities
    uo, ue, sp = v.u_o, v.u_e, setup.sigma_p
    ell = setup.length * uo * sp / math.sqrt(2.0 * D)
    base = intensity**2 * (uo - ue) ** 2 * uo**2 * sp**2 / (D * math.pi**2)
    return base**0.25 * float(special.erf(ell)) ** -0.5


def p2_coherent(setup, intensity=1.0, rel_tol=DEFAULT_REL_TOL):
    """Fair coherent-state comparison at ``intensity`` photons per arm.

    The probability is ``pi^3 D |gamma|^4 / (2 u_o^2 sigma_p^2 (u_o-u_e)^2)``
    times the line-shape-weighted integral. The N00N value it is compared
    against is the unfiltered closed form of :func:`p2_nofilter_limit`.
    """
    if not intensity > 0:
        raise DomainError("intensity must be positive")
    kernel = CoherentKernel.from_setup(setup)
    kernel.check_convergence()
    # narrow bracket features sit near |nu| ~ 1/|a|; flag them in angle space
    bps = [0.0]
    if kernel.erf_slope != 0.0:
        nu_feature = 1.0 / abs(kernel.erf_slope)
        for k in (0.1, 1.0, 10.0):
            th = math.atan(2.0 * k * nu_feature / kernel.kappa_f)
            bps.extend((-th, th))
    q = integrate_interval(kernel.integrand_angle, -0.5 * math.pi, 0.5 * math.pi,
                           rel_tol=rel_tol, panels=16, breakpoints=bps)
    v = setup.velocities
    uo, ue, sp = v.u_o, v.u_e, setup.sigma_p
    gamma = coherent_gamma(setup, intensity)
    pref = math.pi**3 * D * gamma**4 / (2.0 * uo**2 * sp**2 * (uo - ue) ** 2)
    return CoherentComparison(
        intensity=intensity,
        gamma=gamma,
        p2_alpha=float(pref * q.value),
        noon_p2=p2_nofilter_limit(setup),
        quadrature_error=float(pref * q.abs_error_estimate),
        params=setup,
    )


@lru_cache(maxsize=64)
def reference_result(kind="pulsed", reference=REFERENCE_SETUP, rel_tol=DEFAULT_REL_TOL):
    """Cached evaluation of the reference configuration used for scaling."""
    if kind == "pulsed":
        return p2_pulsed(reference, rel_tol)
    if kind == "cw":
        return w2_cw(reference)
    if kind == "nofilter":
        val = p2_nofilter_limit(reference)
        return AbsorptionResult(val, val * normalization_pulsed(reference) ** 2, 0.0,
                                reference, "nofilter")
    raise DomainError(f"unknown objective {kind!r}")


def evaluate(setup, kind="pulsed", rel_tol=DEFAULT_REL_TOL):
    """Dispatch on objective name: ``pulsed``, ``cw`` or ``nofilter``."""
    if kind == "pulsed":
        return p2_pulsed(setup, rel_tol)
    if kind == "cw":
        return w2_cw(setup)
    if kind in ("nofilter", "nofilter_limit"):
        val = p2_nofilter_limit(setup)
        return AbsorptionResult(val, val * normalization_pulsed(setup) ** 2, 0.0,
                                setup, "nofilter")
    raise DomainError(f"unknown objective {kind!r}")


def scaled_value(result, reference=REFERENCE_SETUP, rel_tol=DEFAULT_REL_TOL):
    """``result.raw`` relative to the same objective at ``reference``."""
    return result.raw / reference_result(result.kind, reference, rel_tol).raw
