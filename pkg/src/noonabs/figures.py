"""
Plot-ready datasets for the published figures.

Each builder returns a :class:`FigureData` whose columns carry their units.
Absorption values appear twice: ``scaled`` (relative to the reference
configuration of the matching objective) and ``fraction_of_max`` (relative to
the largest value in the dataset, the normalization used for the cw plots).
"""

from dataclasses import dataclass, field

import numpy as np

from .biphoton import SetupParams, amplitude_grid
from .ideal_states import scaling_table
from .numerics import DEFAULT_REL_TOL
from .optimize import Range, SweepSpec, sweep
from .errors import DomainError

FIGURE_IDS = (1, 3, 4, 5, 6, 7, 8)


@dataclass
class FigureData:
    figure_id: int
    title: str
    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


def _with_fraction(rows, value_index):
    vals = np.array([r[value_index] for r in rows], dtype=float)
    peak = np.nanmax(vals) if np.any(np.isfinite(vals)) else np.nan
    return [tuple(r) + (float(r[value_index] / peak),) for r in rows]


def figure_1(max_n=8):
    rows = [tuple(float(x) if i else int(x) for i, x in enumerate(r)) for r in scaling_table(max_n)]
    return FigureData(1, "N-photon absorption of ideal states, relative to coherent",
                      ("N", "thermal", "coherent", "fock", "noon"), rows,
                      {"max_n": max_n})


def figure_3(points=121, t_min=-10.0, t_max=50.0):
    setup = SetupParams(1e13, 1e13, 1e13, 15e-3, 1e14)
    times, mag = amplitude_grid(t_min * 1e-13, t_max * 1e-13, points, setup)
    t_units = times / 1e-13
    rows = [(float(t_units[i]), float(t_units[j]), float(mag[i, j]))
            for i in range(points) for j in range(points)]
    return FigureData(3, "|A(t1, t2)|, sigma_e = sigma_o = sigma_p = 1e13 Hz, L = 15 mm",
                      ("t1_1e-13s", "t2_1e-13s", "abs_A"), rows,
                      {"params": setup.as_dict(), "points": points})


def _sweep_rows(spec, threads, rel_tol, keys):
    out = []
    for p in sweep(spec, threads, rel_tol):
        s = p.params
        out.append(tuple(k(s) for k in keys) + (float(p.scaled),))
    return out


def figure_4(points=20, threads=None, rel_tol=DEFAULT_REL_TOL):
    spec = SweepSpec(Range(1e11, 10**13.5, points), Range(1e11, 10**13.5, points),
                     1e12, 2.3e-3, 1e14, objective="pulsed")
    rows = _sweep_rows(spec, threads, rel_tol,
                       (lambda s: float(np.log10(s.sigma_e)), lambda s: float(np.log10(s.sigma_o))))
    return FigureData(4, "Scaled P2 over filter bandwidths, L = 2.3 mm, sigma_p = 1e12 Hz, kappa_f = 1e14 Hz",
                      ("log10_sigma_e_Hz", "log10_sigma_o_Hz", "scaled", "fraction_of_max"),
                      _with_fraction(rows, 2), {"points": points})


def figure_5(points=31, threads=None, rel_tol=DEFAULT_REL_TOL, kappas=(1e11, 1e12, 1e14)):
    rows = []
    for kf in kappas:
        spec = SweepSpec(1e13, 1e13, Range(1e10, 1e13, points), 2.3e-3, kf, objective="pulsed")
        rows += _sweep_rows(spec, threads, rel_tol,
                            (lambda s: float(s.kappa_f), lambda s: float(np.log10(s.sigma_p))))
    return FigureData(5, "Scaled P2 over pump bandwidth, L = 2.3 mm, sigma_e = sigma_o = 1e13 Hz",
                      ("kappa_f_Hz", "log10_sigma_p_Hz", "scaled", "fraction_of_max"),
                      _with_fraction(rows, 2), {"points": points, "kappas": list(kappas)})


def _length_family(objective, sigmas, lo_mm, hi_mm, points, threads, rel_tol):
    rows = []
    for sig in sigmas:
        spec = SweepSpec(sig, sig, 1e12, Range(lo_mm * 1e-3, hi_mm * 1e-3, points, log=False),
                         1e14, objective=objective)
        rows += _sweep_rows(spec, threads, rel_tol,
                            (lambda s: float(s.sigma_e), lambda s: float(s.length * 1e3)))
    return _with_fraction(rows, 2)


def figure_6(points=60, threads=None, rel_tol=DEFAULT_REL_TOL, sigmas=(1e13, 4e12)):
    rows = _length_family("pulsed", sigmas, 0.1, 20.0, points, threads, rel_tol)
    return FigureData(6, "Scaled P2 over crystal length, sigma_p = 1e12 Hz, kappa_f = 1e14 Hz",
                      ("sigma_filter_Hz", "length_mm", "scaled", "fraction_of_max"), rows,
                      {"points": points, "sigmas": list(sigmas)})


def figure_7(points=60, threads=None, rel_tol=DEFAULT_REL_TOL,
             sigmas=(2.5e12, 5e12, 7.5e12, 1e13)):
    rows = _length_family("cw", sigmas, 0.5, 20.0, points, threads, rel_tol)
    return FigureData(7, "cw rate over crystal length",
                      ("sigma_filter_Hz", "length_mm", "scaled", "fraction_of_max"), rows,
                      {"points": points, "sigmas": list(sigmas)})


def figure_8(points=20, threads=None, rel_tol=DEFAULT_REL_TOL):
    ax = Range(1e12, 1e13, points, log=False)
    spec = SweepSpec(ax, ax, 1e12, 6e-3, 1e14, objective="cw")
    rows = _sweep_rows(spec, threads, rel_tol,
                       (lambda s: float(s.sigma_e / 1e13), lambda s: float(s.sigma_o / 1e13)))
    return FigureData(8, "cw rate over filter bandwidths, L = 6 mm",
                      ("sigma_e_1e13Hz", "sigma_o_1e13Hz", "scaled", "fraction_of_max"),
                      _with_fraction(rows, 2), {"points": points})


BUILDERS = {1: figure_1, 3: figure_3, 4: figure_4, 5: figure_5, 6: figure_6, 7: figure_7, 8: figure_8}


def build(figure_id, threads=None, rel_tol=DEFAULT_REL_TOL):
    try:
        fn = BUILDERS[int(figure_id)]
    except (KeyError, ValueError):
        raise DomainError(f"unknown figure {figure_id!r}; choose from {FIGURE_IDS}") from None
    if figure_id in (1, 3):
        return fn()
    return fn(threads=threads, rel_tol=rel_tol)
