"""
Special functions and adaptive quadrature.

The complex error function, the Faddeeva function and K0 are thin wrappers
over :mod:`scipy.special` that add domain checks. The quadrature is a
vectorized, globally adaptive 7/15-point Gauss-Kronrod scheme: every sweep
evaluates the integrand once on all panels that still need work, so the
integrands here should accept and return NumPy arrays.

Integrands of the form ``exp(-a x**2) * |erf(i b x) - erf(i b x - L)|**2`` are
never formed directly. :func:`erf_window_scaled` returns the bracket with its
``exp(b**2 x**2)`` growth already divided out, so the caller combines
exponents before exponentiating.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, QuadratureError

# QUADPACK qk15 abscissae and weights (non-negative half, symmetric).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-node rule laid out left to right.
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5, 9, 11, 13]] = np.concatenate([_WG[:3], _WG[:3][::-1]])
GAUSS_WEIGHTS[7] = _WG[3]

DEFAULT_REL_TOL = 1e-8
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def erf_complex(z):
    """Error function for real or complex ``z``.

    Raises
    ------
    OverflowError
        If the result is not representable (``erf(i y)`` grows like
        ``exp(y**2)``); use :func:`faddeeva_scaled` instead.
    """
    z_arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z_arr)):
        raise DomainError("erf_complex needs a finite argument")
    with np.errstate(over="ignore", invalid="ignore"):
        out = special.erf(z_arr)
    if not np.all(np.isfinite(out)):
        raise OverflowError(
            "erf overflows for this argument; evaluate via faddeeva_scaled"
        )
    return out[()] if out.ndim == 0 else out


def faddeeva_scaled(z):
    """Faddeeva function ``w(z) = exp(-z**2) erfc(-i z)``.

    Accurate on the whole upper half-plane; lower half-plane values are
    obtained by scipy through ``w(-z) = 2 exp(-z**2) - w(z)`` and may overflow.
    """
    z_arr = np.asarray(z, dtype=complex)
    out = special.wofz(z_arr)
    return out[()] if out.ndim == 0 else out


def erf_window_scaled(x, ell):
    """``exp(-x**2) * [erf(i x) - erf(i x - ell)]`` for real ``x`` and ``ell``.

    Both error functions grow like ``exp(x**2)`` along the imaginary axis, so
    the unscaled bracket overflows for ``|x| > 26``. With ``ell >= 0`` the
    bracket equals ``w(x) - exp(-ell**2 + 2i ell x) w(x + i ell)``, which
    only touches ``w`` on the closed upper half-plane. Negative ``ell`` uses
    ``F(x, -ell) = -F(-x, ell)``.
    """
    x = np.asarray(x, dtype=float)
    ell = float(ell)
    if ell < 0.0:
        return -erf_window_scaled(-x, -ell)
    phase = np.exp(-ell * ell + 2j * ell * x)
    out = special.wofz(x.astype(complex)) - phase * special.wofz(x + 1j * ell)
    return out[()] if out.ndim == 0 else out


def erf_diff(a, b):
    """``erf(a) - erf(b)`` for real arguments without catastrophic cancellation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape)
    pos = (a > 0) & (b > 0)
    neg = (a < 0) & (b < 0)
    mid = ~(pos | neg)
    out[pos] = special.erfc(b[pos]) - special.erfc(a[pos])
    out[neg] = special.erfc(-a[neg]) - special.erfc(-b[neg])
    out[mid] = special.erf(a[mid]) - special.erf(b[mid])
    return out[()] if out.ndim == 0 else out


def bessel_k0(x):
    """Modified Bessel function of the second kind, order zero."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise DomainError("K0 is defined for x > 0 only")
    out = special.k0(x_arr)
    return out[()] if out.ndim == 0 else out


def bessel_k0_scaled(x):
    """``exp(x) * K0(x)``, finite for arbitrarily large ``x``."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise DomainError("K0 is defined for x > 0 only")
    out = special.k0e(x_arr)
    return out[()] if out.ndim == 0 else out


def _gauss_kronrod(f, lo, hi):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("integrand returned a non-finite value")
    resk = fx @ KRONROD_WEIGHTS
    resg = fx @ GAUSS_WEIGHTS
    resasc = np.abs(fx - 0.5 * resk[:, None]) @ KRONROD_WEIGHTS
    resabs = np.abs(fx) @ KRONROD_WEIGHTS
    err = np.abs(resk - resg)
    # QUADPACK's error sharpening and round-off floor.
    with np.errstate(divide="ignore", invalid="ignore"):
        sharp = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), sharp, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(resabs > np.finfo(float).tiny / (50 * _EPS), np.maximum(err, floor), err)
    return resk * half, err * np.abs(half)


def integrate_interval(f, a, b, rel_tol=DEFAULT_REL_TOL, abs_tol=0.0,
                       panels=8, breakpoints=(), max_evaluations=200_000):
    """Globally adaptive Gauss-Kronrod integral of a vectorized ``f`` over ``[a, b]``.

    Panels whose error estimate exceeds their width-proportional share of the
    tolerance are bisected until the summed estimate meets
    ``max(rel_tol * |I|, abs_tol)``. ``breakpoints`` inside ``(a, b)`` are
    added to the initial panel edges (use them to flag narrow features).

    Raises
    ------
    QuadratureError
        When the evaluation budget is exhausted or panels can no longer be
        split; ``exc.result`` carries the best estimate.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError("integrate_interval needs finite limits")
    if rel_tol <= 0 and abs_tol <= 0:
        raise DomainError("need a positive rel_tol or abs_tol")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    edges = np.linspace(a, b, panels + 1)
    extra = np.asarray(breakpoints, dtype=float).ravel()
    extra = extra[(extra > a) & (extra < b)]
    edges = np.unique(np.concatenate([edges, extra]))
    lo, hi = edges[:-1], edges[1:]
    val, err = _gauss_kronrod(f, lo, hi)
    evaluations = 15 * lo.size
    width = b - a

    while True:
        total = val.sum()
        err_total = err.sum()
        tol = max(rel_tol * abs(total), abs_tol)
        if err_total <= tol:
            return QuadratureResult(sign * total, err_total, evaluations)

        share = tol * (hi - lo) / width
        split = err > share
        splittable = (hi - lo) > 64 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        split &= splittable
        if not split.any() or evaluations >= max_evaluations:
            best = QuadratureResult(sign * total, err_total, evaluations)
            raise QuadratureError(
                f"quadrature stalled at error {err_total:.3e} > tolerance {tol:.3e}",
                result=best,
            )

        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_val, new_err = _gauss_kronrod(f, new_lo, new_hi)
        evaluations += 15 * new_lo.size

        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        order = np.argsort(lo, kind="stable")
        lo, hi, val, err = lo[order], hi[order], val[order], err[order]


def truncation_radius(decay_scale, rel_tol=DEFAULT_REL_TOL):
    """Half-width beyond which ``exp(-(x/decay_scale)**2) < rel_tol * 1e-2``."""
    return decay_scale * np.sqrt(-np.log(rel_tol * 1e-2))


def integrate_line(f, decay_scale, rel_tol=DEFAULT_REL_TOL, center=0.0, panels=16,
                   breakpoints=()):
    """Integral of ``f`` over the real line for Gaussian-dominated integrands.

    ``decay_scale`` is the width ``s`` of the envelope ``exp(-(x/s)**2)``; the
    line is truncated symmetrically about ``center`` where the envelope falls
    below ``rel_tol * 1e-2`` of its peak.
    """
    if not decay_scale > 0:
        raise DomainError("decay_scale must be positive")
    radius = truncation_radius(decay_scale, rel_tol)
    return integrate_interval(
        f, center - radius, center + radius, rel_tol=rel_tol, panels=panels,
        breakpoints=breakpoints,
    )
