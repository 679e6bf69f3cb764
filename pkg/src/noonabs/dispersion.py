"""
Crystal dispersion: Sellmeier indices, the effective extraordinary index at
the cut angle, and group velocities for degenerate collinear type-II SPDC.

Sellmeier form (wavelength in microns)::

    n**2 = A + B / (lam**2 - C) - D * lam**2 + E * lam**4

Derivatives are taken in closed form; the pump and the extraordinary daughter
both see the effective index ``[cos^2(phi)/n_o^2 + sin^2(phi)/n_e^2]**-0.5``.
"""

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

from scipy.constants import c as SPEED_OF_LIGHT

from .errors import DegenerateVelocityError, DomainError

BAND_UM = (0.3, 1.2)


@dataclass(frozen=True)
class CrystalDispersion:
    sellmeier_o: tuple
    sellmeier_e: tuple
    optic_axis_angle: float  # radians
    name: str = "custom"

    def __post_init__(self):
        for label, coeffs in (("sellmeier_o", self.sellmeier_o), ("sellmeier_e", self.sellmeier_e)):
            if len(coeffs) != 5:
                raise DomainError(f"{label} needs five coefficients, got {len(coeffs)}")
            object.__setattr__(self, label, tuple(float(v) for v in coeffs))
        if not 0.0 <= self.optic_axis_angle <= math.pi / 2:
            raise DomainError("optic axis angle must lie in [0, pi/2]")

    @property
    def optic_axis_angle_deg(self):
        return math.degrees(self.optic_axis_angle)


BBO = CrystalDispersion(
    sellmeier_o=(2.7359, 0.01878, 0.01822, 0.0135, 0.0),
    sellmeier_e=(2.3753, 0.01224, 0.01667, 0.01516, 0.0),
    optic_axis_angle=math.radians(42.4),
    name="BBO",
)

PRESETS = {"bbo": BBO}


def _check_band(lam):
    lo, hi = BAND_UM
    if not lo <= lam <= hi:
        raise DomainError(f"wavelength {lam} um outside supported band {lo}-{hi} um")


def _radicand(lam, coeffs):
    a, b, pole, d, e = coeffs
    lam2 = lam * lam
    den = lam2 - pole
    if abs(den) <= 1e-12 * abs(pole):
        raise DomainError(f"Sellmeier pole at lambda^2 = {pole}")
    return a + b / den - d * lam2 + e * lam2 * lam2


def _radicand_slope(lam, coeffs):
    # d(n^2)/d(lambda)
    _, b, pole, d, e = coeffs
    lam2 = lam * lam
    return -2.0 * b * lam / (lam2 - pole) ** 2 - 2.0 * d * lam + 4.0 * e * lam2 * lam


def sellmeier_index(lam, coeffs, check_band=True):
    if check_band:
        _check_band(lam)
    n2 = _radicand(lam, coeffs)
    if n2 <= 0.0:
        raise DomainError(f"Sellmeier radicand {n2} is not positive at {lam} um")
    return math.sqrt(n2)


def sellmeier_slope(lam, coeffs, check_band=True):
    """dn/dlambda in 1/um."""
    n = sellmeier_index(lam, coeffs, check_band)
    return _radicand_slope(lam, coeffs) / (2.0 * n)


def index_ordinary(lam, crystal=BBO):
    return sellmeier_index(lam, crystal.sellmeier_o)


def index_extraordinary(lam, crystal=BBO):
    return sellmeier_index(lam, crystal.sellmeier_e)


def index_effective(lam, phi=None, crystal=BBO):
    """Index seen by an extraordinary ray at angle ``phi`` (radians) to the optic axis."""
    if phi is None:
        phi = crystal.optic_axis_angle
    n_o = index_ordinary(lam, crystal)
    n_e = index_extraordinary(lam, crystal)
    return (math.cos(phi) ** 2 / n_o**2 + math.sin(phi) ** 2 / n_e**2) ** -0.5


def index_effective_slope(lam, phi=None, crystal=BBO):
    """Analytic d n_eff / d lambda (1/um)."""
    if phi is None:
        phi = crystal.optic_axis_angle
    n_o = index_ordinary(lam, crystal)
    n_e = index_extraordinary(lam, crystal)
    dn_o = sellmeier_slope(lam, crystal.sellmeier_o)
    dn_e = sellmeier_slope(lam, crystal.sellmeier_e)
    cos2, sin2 = math.cos(phi) ** 2, math.sin(phi) ** 2
    s = cos2 / n_o**2 + sin2 / n_e**2
    ds = -2.0 * cos2 * dn_o / n_o**3 - 2.0 * sin2 * dn_e / n_e**3
    return -0.5 * s**-1.5 * ds


def group_velocity(beam, lam, crystal=BBO):
    """Group velocity (m/s) of ``beam`` in {'ordinary', 'extraordinary', 'pump'}.

    ``U = c / (n - lam * dn/dlam)`` with ``n = n_o`` for the ordinary beam and
    the effective index for the pump and extraordinary beams.
    """
    if beam == "ordinary":
        n = index_ordinary(lam, crystal)
        dn = sellmeier_slope(lam, crystal.sellmeier_o)
    elif beam in ("extraordinary", "pump"):
        n = index_effective(lam, crystal=crystal)
        dn = index_effective_slope(lam, crystal=crystal)
    else:
        raise DomainError(f"unknown beam {beam!r}")
    return SPEED_OF_LIGHT / (n - lam * dn)


@dataclass(frozen=True)
class VelocityBundle:
    """Group velocities (m/s) and inverse-velocity differences (s/m)."""

    U_e: float
    U_o: float
    U_p: float

    @property
    def u_e(self):
        return 1.0 / self.U_p - 1.0 / self.U_e

    @property
    def u_o(self):
        return 1.0 / self.U_p - 1.0 / self.U_o

    @property
    def U_2(self):
        # 1/U_o - 1/U_e, written without the cancellation of the reciprocals
        return (self.U_e - self.U_o) / (self.U_e * self.U_o)

    @property
    def u(self):
        return (self.U_e - self.U_o) / (self.U_e * self.U_o)

    def require_walkoff(self):
        if self.U_e == self.U_o:
            raise DegenerateVelocityError("U_e == U_o: no temporal walk-off between daughters")

    def as_dict(self):
        return {
            "U_e": self.U_e, "U_o": self.U_o, "U_p": self.U_p,
            "u_e": self.u_e, "u_o": self.u_o, "U_2": self.U_2, "u": self.u,
        }


def velocity_bundle(lambda_pump, crystal=BBO):
    """Velocities for the degenerate case, daughters at twice the pump wavelength."""
    lam_d = 2.0 * lambda_pump
    return VelocityBundle(
        U_e=group_velocity("extraordinary", lam_d, crystal),
        U_o=group_velocity("ordinary", lam_d, crystal),
        U_p=group_velocity("pump", lambda_pump, crystal),
    )


def load_crystal(source):
    """Read a crystal description.

    ``source`` is a preset name (``"bbo"``) or a path to a key-value file::

        [crystal]
        name = BBO
        sellmeier_o = 2.7359, 0.01878, 0.01822, 0.0135, 0
        sellmeier_e = 2.3753, 0.01224, 0.01667, 0.01516, 0
        optic_axis_angle_deg = 42.4
    """
    if isinstance(source, CrystalDispersion):
        return source
    key = str(source).lower()
    if key in PRESETS:
        return PRESETS[key]
    path = Path(source)
    if not path.is_file():
        raise DomainError(f"no crystal preset or file named {source!r}")
    parser = configparser.ConfigParser()
    parser.read_string(path.read_text())
    if "crystal" not in parser:
        raise DomainError(f"{path}: missing [crystal] section")
    sec = parser["crystal"]
    try:
        return CrystalDispersion(
            sellmeier_o=tuple(float(v) for v in sec["sellmeier_o"].split(",")),
            sellmeier_e=tuple(float(v) for v in sec["sellmeier_e"].split(",")),
            optic_axis_angle=math.radians(float(sec["optic_axis_angle_deg"])),
            name=sec.get("name", path.stem),
        )
    except KeyError as exc:
        raise DomainError(f"{path}: missing key {exc}") from None
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None
