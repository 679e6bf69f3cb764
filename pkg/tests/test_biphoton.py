import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from _oracles import limit_sample_pairs, moving_width, within_limit_tolerance
from noonabs.biphoton import (
    D,
    AmplitudeKernelConstants,
    SetupParams,
    amplitude_cw,
    amplitude_full,
    amplitude_grid,
    amplitude_nofilter_limit,
    amplitude_script_a,
    nofilter_window,
    rect,
)
from noonabs.errors import DomainError

FIG3 = SetupParams(1e13, 1e13, 1e13, 15e-3, 1e14)


def test_setup_validation():
    with pytest.raises(DomainError):
        SetupParams(0, 1e13, 1e13, 1e-3, 1e14)
    with pytest.raises(DomainError):
        SetupParams(1e13, 1e13, -1, 1e-3, 1e14)
    with pytest.raises(DomainError):
        SetupParams(1e13, 1e13, 1e13, 1e-3, float("nan"))
    with pytest.raises(DomainError):
        AmplitudeKernelConstants.from_setup(FIG3.with_(sigma_p=0.0))
    assert FIG3.as_dict()["length_mm"] == pytest.approx(15.0)


def test_kernel_constants():
    k = AmplitudeKernelConstants.from_setup(FIG3)
    assert k.U**2 == pytest.approx(k.P_U**2 + k.E_U**2 + k.O_U**2, rel=1e-12)
    assert k.l > 0
    assert k.D == 4 * math.log(2)


def test_origin_value():
    k = AmplitudeKernelConstants.from_setup(FIG3)
    a = amplitude_script_a(0.0, 0.0, FIG3)
    assert abs(a) == pytest.approx(k.prefactor * special.erf(k.l), rel=1e-13)


def test_far_apart_times_vanish():
    times, mag = amplitude_grid(-10e-13, 50e-13, 61, FIG3)
    far = abs(amplitude_full(200e-13, -200e-13, FIG3))
    assert far < 1e-8 * mag.max()


def test_swap_symmetry_random_pairs():
    rng = np.random.default_rng(0)
    t = rng.uniform(-10e-13, 50e-13, size=(20, 2))
    a = np.abs(amplitude_full(t[:, 0], t[:, 1], FIG3))
    b = np.abs(amplitude_full(t[:, 1], t[:, 0], FIG3))
    assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(a, b))


def test_coincident_times_double():
    for t in (0.0, 3e-13, 2e-12):
        assert amplitude_full(t, t, FIG3) == pytest.approx(2 * amplitude_script_a(t, t, FIG3), rel=1e-15)


def test_fig3_grid_symmetric():
    times, mag = amplitude_grid(-10e-13, 50e-13, 61, FIG3)
    assert mag.shape == (61, 61)
    assert np.max(np.abs(mag - mag.T)) <= 1e-12 * mag.max()
    with pytest.raises(DomainError):
        amplitude_grid(1.0, 0.0, 10, FIG3)


def test_gaussian_exponent_vanishes_on_its_null_line():
    k = AmplitudeKernelConstants.from_setup(FIG3)
    t2 = np.linspace(-5e-12, 5e-12, 11)
    t1 = -t2 * (k.E_U * k.sigma_e) / (k.O_U * k.sigma_o)
    assert np.all(k.gaussian_exponent(t1, t2) < 1e-12)


def test_width_grows_with_length():
    widths = []
    for L in (1e-3, 5e-3, 15e-3):
        times, mag = amplitude_grid(-20e-13, 80e-13, 161, FIG3.with_(length=L))
        widths.append(moving_width(times, mag))
    assert widths[0] < widths[1] < widths[2]


def test_rect():
    assert rect(0.0) == 1.0
    assert rect(0.5) == 0.5 and rect(-0.5) == 0.5
    assert rect(0.51) == 0.0 and rect(-3.0) == 0.0


def test_nofilter_limit_window():
    s = SetupParams(1e16, 1e16, 1e12, 2e-3, 1e14)
    A, B, J = nofilter_window(1e-13, 0.0, s)
    assert B > 0 and J >= 0
    # far outside the window
    assert amplitude_nofilter_limit(5e-11, 0.0, s) == 0.0


def test_script_a_tends_to_rect_limit():
    s = SetupParams(1e16, 1e16, 1e12, 2e-3, 1e14)
    t1, t2 = limit_sample_pairs(s, seed=4)
    got = amplitude_script_a(t1, t2, s)
    want = amplitude_nofilter_limit(t1, t2, s)
    assert np.count_nonzero(want) >= 30
    assert np.all(within_limit_tolerance(got, want))


def test_cw_stationary():
    s = SetupParams(5e12, 8e12, 0.0, 3e-3, 1e14)
    t1, t2 = 1.3e-12, -0.4e-12
    a = abs(amplitude_cw(t1, t2, s))
    for tau in (-5e-12, 1e-13, 7e-12):
        assert abs(amplitude_cw(t1 + tau, t2 + tau, s)) == pytest.approx(a, rel=1e-12)


def test_cw_peak_at_half_walkoff():
    s = SetupParams(5e12, 8e12, 0.0, 3e-3, 1e14)
    Lu = s.length * s.velocities.u
    d = np.linspace(-Lu, 2 * Lu, 30001)
    mag = np.abs(amplitude_cw(d, 0.0, s))
    assert d[np.argmax(mag)] == pytest.approx(Lu / 2, rel=1e-3)


def test_cw_broadband_window():
    s = SetupParams(1e18, 1e18, 0.0, 3e-3, 1e14)
    v = s.velocities
    Lu = s.length * v.u
    inside = abs(amplitude_cw(0.5 * Lu, 0.0, s)) * abs(v.U_e - v.U_o)
    outside = abs(amplitude_cw(1.5 * Lu, 0.0, s)) * abs(v.U_e - v.U_o)
    assert inside == pytest.approx(2.0, rel=1e-12)
    assert outside < 1e-12


@given(st.floats(-5e-12, 5e-12), st.floats(-5e-12, 5e-12),
       st.floats(11, 13.5), st.floats(11, 13.5), st.floats(10, 13))
@settings(max_examples=60, deadline=None)
def test_full_amplitude_finite_and_symmetric(t1, t2, lse, lso, lsp):
    s = SetupParams(10**lse, 10**lso, 10**lsp, 2.3e-3, 1e14)
    a = amplitude_full(t1, t2, s)
    b = amplitude_full(t2, t1, s)
    assert np.isfinite(a)
    assert abs(abs(a) - abs(b)) <= 1e-12 * max(abs(a), abs(b), 1e-300)


def test_constant_d():
    assert D == pytest.approx(2.772588722239781, rel=1e-15)
