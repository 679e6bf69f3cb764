"""Two-photon absorption of SPDC-generated N00N light, and its optimization."""

from .absorption import (
    REFERENCE_SETUP,
    AbsorptionResult,
    CoherentComparison,
    p2_coherent,
    p2_nofilter_exact,
    p2_nofilter_limit,
    p2_pulsed,
    w2_cw,
)
from .biphoton import SetupParams, amplitude_cw, amplitude_full, amplitude_nofilter_limit
from .dispersion import BBO, CrystalDispersion, velocity_bundle
from .errors import (
    AllPointsDivergedError,
    DivergenceError,
    DomainError,
    NoonAbsError,
    QuadratureError,
)
from .ideal_states import IdealState, absorption_probability, scaling_table
from .optimize import SweepSpec, load_spec, maximize, sweep

__version__ = "0.1.0"
