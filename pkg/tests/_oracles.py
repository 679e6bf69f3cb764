"""Independent reference computations shared by the test modules."""

import mpmath
import numpy as np

mpmath.mp.dps = 30


def within_limit_tolerance(got, want, frac=0.01):
    """Pointwise 1% agreement; where the reference vanishes, 1% of its peak."""
    got = np.abs(np.asarray(got))
    want = np.abs(np.asarray(want))
    peak = want.max()
    scale = np.where(want > 0, want, peak)
    return np.abs(got - want) <= frac * scale


def limit_sample_pairs(setup, seed, n=100, edge_widths=20.0):
    """Random (t1, t2) pairs spread across and around the no-filter window.

    The Rect edges are sharp only in the limit; at finite bandwidth they are
    smoothed over a few 1/sigma, so pairs closer than ``edge_widths / sigma``
    to an edge are redrawn.
    """
    width = setup.length * setup.velocities.U_2
    band = edge_widths / min(setup.sigma_e, setup.sigma_o)
    rng = np.random.default_rng(seed)
    avg = rng.uniform(-2e-12, 2e-12, n)
    diff = rng.uniform(-1.5 * width, 0.5 * width, n)
    bad = (np.abs(diff) < band) | (np.abs(diff + width) < band)
    while bad.any():
        diff[bad] = rng.uniform(-1.5 * width, 0.5 * width, int(bad.sum()))
        bad = (np.abs(diff) < band) | (np.abs(diff + width) < band)
    return avg + diff / 2, avg - diff / 2


def p2_integral_mp(erf_slope, ell, gaussian, kappa_f, dps=30):
    """Direct high-precision integral of
    exp(-g nu^2) |erf(i a nu) - erf(i a nu - ell)|^2 / (1 + 4 nu^2 / kf^2)
    with no rescaling of the growing error functions."""
    with mpmath.workdps(dps):
        a, L, g, kf = (mpmath.mpf(x) for x in (erf_slope, ell, gaussian, kappa_f))

        def f(nu):
            br = mpmath.erf(1j * a * nu) - mpmath.erf(1j * a * nu - L)
            return mpmath.exp(-g * nu * nu) * abs(br) ** 2 / (1 + 4 * nu * nu / (kf * kf))

        net = g - 2 * a * a
        s = 1 / mpmath.sqrt(net) if net > 0 else kf
        pts = sorted({-40 * s, -4 * s, -s, -kf / 2, 0, kf / 2, s, 4 * s, 40 * s})
        pts = [p for p in pts if abs(p) <= 40 * s]
        return float(mpmath.quad(f, pts))


def moving_width(times, mag):
    """RMS spread of t1 - t2 under the weight |A|^2 on a square grid."""
    t1, t2 = np.meshgrid(times, times, indexing="ij")
    w = mag**2
    d = t1 - t2
    mu = np.sum(w * d) / np.sum(w)
    return float(np.sqrt(np.sum(w * (d - mu) ** 2) / np.sum(w)))


def coherent_integral_mp(erf_slope, ell, gaussian, kappa_f, dps=30):
    """exp(-g nu^2) |erf(i a nu) - erf(i a nu + ell)|^2 / (1 + 4 nu^2 / kf^2) over the line."""
    with mpmath.workdps(dps):
        a, L, g, kf = (mpmath.mpf(x) for x in (erf_slope, ell, gaussian, kappa_f))

        def f(nu):
            br = mpmath.erf(1j * a * nu) - mpmath.erf(1j * a * nu + L)
            return mpmath.exp(-g * nu * nu) * abs(br) ** 2 / (1 + 4 * nu * nu / (kf * kf))

        feature = 1 / abs(a)
        pts = sorted({0, kf / 2, feature, 10 * feature, 100 * kf})
        pts = [-mpmath.inf] + [-p for p in reversed(pts) if p] + pts + [mpmath.inf]
        return float(mpmath.quad(f, pts))


def erf_series(z):
    """Maclaurin series of erf, summed past working precision."""
    z = mpmath.mpc(z)
    term = z
    total = z
    k = 0
    while True:
        k += 1
        term *= -z * z / k
        add = term / (2 * k + 1)
        total += add
        if abs(add) < mpmath.mpf("1e-40") * max(1, abs(total)):
            break
    return complex(2 / mpmath.sqrt(mpmath.pi) * total)


def faddeeva_integral(z):
    """w(z) = (i/pi) int exp(-t^2)/(z - t) dt, valid for Im z > 0."""
    z = mpmath.mpc(z)
    f = lambda t: mpmath.exp(-t * t) / (z - t)
    inner = sorted({-9.0, float(z.real) - 1, float(z.real), float(z.real) + 1, 9.0})
    pts = [-mpmath.inf] + inner + [mpmath.inf]
    return complex(1j / mpmath.pi * mpmath.quad(f, pts))


def k0_integral(x):
    """K0(x) = int_0^inf exp(-x cosh t) dt, cut where the integrand is below exp(-120)."""
    top = float(mpmath.acosh(120 / x)) if x < 120 else 1.0
    pts = [0] + [p for p in (0.5, 1, 2, 4, 6, 8, 10) if p < top] + [top]
    return float(mpmath.quad(lambda t: mpmath.exp(-x * mpmath.cosh(t)), pts))
