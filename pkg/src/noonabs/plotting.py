"""
Static renderings of :class:`~noonabs.figures.FigureData`.

Uses the non-interactive Agg backend and writes PNGs without timestamps, so
repeated runs produce identical files.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
FIG_WIDTH = 3.4  # single column, inches

STYLE = {
    "font.family": "serif",
    "font.size": 8,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "mathtext.fontset": "stix",
    "lines.linewidth": 1.0,
    "figure.figsize": (FIG_WIDTH, FIG_WIDTH * GOLDEN),
    "figure.dpi": 150,
    "savefig.dpi": 200,
    "svg.hashsalt": "noonabs",
}

_PNG_META = {"Software": None}


def _grid(data, xcol, ycol, zcol):
    x = np.unique(data.column(xcol))
    y = np.unique(data.column(ycol))
    z = data.column(zcol).reshape(len(x), len(y))
    return x, y, z


def _families(data, keycol, xcol, ycol):
    keys = data.column(keycol)
    for k in dict.fromkeys(keys.tolist()):
        sel = keys == k
        yield k, data.column(xcol)[sel], data.column(ycol)[sel]


def _fig1(ax, data):
    n = data.column("N")
    for name, marker in (("thermal", "o"), ("coherent", "s"), ("noon", "^"), ("fock", "v")):
        ax.semilogy(n, data.column(name), marker=marker, ms=3, label=name)
    ax.set_xlabel("N")
    ax.set_ylabel(r"$P_N / P_N^{\mathrm{coh}}$")
    ax.legend(frameon=False)


def _fig3(ax, data):
    t1, t2, z = _grid(data, "t1_1e-13s", "t2_1e-13s", "abs_A")
    cs = ax.contourf(t1, t2, z.T, levels=20, cmap="viridis")
    ax.figure.colorbar(cs, ax=ax, label="|A|")
    ax.set_xlabel(r"$t_1$ ($10^{-13}$ s)")
    ax.set_ylabel(r"$t_2$ ($10^{-13}$ s)")
    ax.set_aspect("equal")


def _surface(ax, data, xcol, ycol, xlabel, ylabel, zlabel):
    x, y, z = _grid(data, xcol, ycol, "scaled")
    cs = ax.contourf(x, y, z.T, levels=20, cmap="viridis")
    ax.figure.colorbar(cs, ax=ax, label=zlabel)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)


def _fig4(ax, data):
    _surface(ax, data, "log10_sigma_e_Hz", "log10_sigma_o_Hz",
             r"$\log_{10}\sigma_e$", r"$\log_{10}\sigma_o$", r"$\widetilde{P}_2$")


def _fig5(ax, data):
    for kf, x, y in _families(data, "kappa_f_Hz", "log10_sigma_p_Hz", "scaled"):
        ax.plot(x, y, label=rf"$\kappa_f=10^{{{np.log10(kf):.0f}}}$ Hz")
    ax.set_xlabel(r"$\log_{10}\sigma_p$")
    ax.set_ylabel(r"$\widetilde{P}_2$")
    ax.legend(frameon=False)


def _length_plot(ax, data, ylabel, column):
    for sig, x, y in _families(data, "sigma_filter_Hz", "length_mm", column):
        ax.plot(x, y, label=rf"$\sigma_e=\sigma_o={sig / 1e12:g}\times10^{{12}}$ Hz")
    ax.set_xlabel("L (mm)")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)


def _fig6(ax, data):
    _length_plot(ax, data, r"$\widetilde{P}_2$", "scaled")


def _fig7(ax, data):
    _length_plot(ax, data, r"$\widetilde{w}_2$", "fraction_of_max")


def _fig8(ax, data):
    x, y, z = _grid(data, "sigma_e_1e13Hz", "sigma_o_1e13Hz", "fraction_of_max")
    cs = ax.contourf(x, y, z.T, levels=20, cmap="viridis")
    ax.figure.colorbar(cs, ax=ax, label=r"$\widetilde{w}_2$")
    ax.set_xlabel(r"$\sigma_e$ ($10^{13}$ Hz)")
    ax.set_ylabel(r"$\sigma_o$ ($10^{13}$ Hz)")


_RENDERERS = {1: _fig1, 3: _fig3, 4: _fig4, 5: _fig5, 6: _fig6, 7: _fig7, 8: _fig8}


def render(data, path):
    """Draw ``data`` and save it as a PNG at ``path``."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(constrained_layout=True)
        try:
            _RENDERERS[data.figure_id](ax, data)
            fig.savefig(path, format="png", metadata=_PNG_META)
        finally:
            plt.close(fig)
    return path
