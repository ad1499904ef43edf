"""Matplotlib rendering of fields, histograms and curves to image files."""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 5.0

params = {
    "axes.labelsize": 10,
    "font.size": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "mathtext.fontset": "stix",
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
}

# keep PNG output free of version/date metadata
_png_meta = {"Software": None}


def new_figure(nrows=1, ncols=1, width=fig_width, aspect=golden_mean):
    with matplotlib.rc_context(params):
        fig, ax = plt.subplots(nrows, ncols, figsize=(width * ncols, width * aspect * nrows),
                               squeeze=False)
    return fig, ax


def save(fig, path):
    with matplotlib.rc_context(params):
        fig.tight_layout()
        fig.savefig(path, metadata=_png_meta)
    plt.close(fig)
    return path


def _extent(grid):
    if grid.mode == "sphere":
        return [0.0, 2 * np.pi, -1.0, 1.0], r"$\phi$", r"$\cos\theta$"
    return [-2.0, 2.0, -2.0, 2.0], r"$Q$", r"$P$"


def plot_field(field, path, title=None, cmap="viridis"):
    """Raster heatmap; masked points (regular islands) are left blank."""
    grid = field.grid
    mat = grid.raster(np.where(field.mask, field.values, np.nan))
    fig, ax = new_figure(aspect=0.8 if grid.mode == "disk" else golden_mean)
    ax = ax[0, 0]
    extent, xl, yl = _extent(grid)
    im = ax.imshow(np.ma.masked_invalid(mat), origin="lower", extent=extent, aspect="auto",
                   cmap=cmap, interpolation="nearest")
    fig.colorbar(im, ax=ax, label=field.label)
    ax.set_xlabel(xl)
    ax.set_ylabel(yl)
    if title:
        ax.set_title(title)
    return save(fig, path)


def plot_histograms(hists, path, xlabel="value"):
    """Overlay step histograms given as ``{label: Histogram}``."""
    fig, ax = new_figure()
    ax = ax[0, 0]
    for label, h in hists.items():
        ax.stairs(h.densities, h.edges, label=str(label))
    ax.set_xlabel(xlabel)
    ax.set_ylabel("probability")
    ax.legend(frameon=False)
    return save(fig, path)


def plot_curve(curve, path):
    fig, ax = new_figure(2, 1)
    tau = np.asarray(curve.taus, float)
    for a, y, w, lab in ((ax[0, 0], curve.pearson, curve.pearson_window, r"$C_p$"),
                         (ax[1, 0], curve.js, curve.js_window, r"$D_{JS}$")):
        a.plot(tau, y, "o-")
        a.axvspan(w[0], w[1], color="0.85", zorder=0)
        a.set_xscale("log")
        a.set_ylabel(lab)
    ax[1, 0].set_xlabel(r"$\tau$")
    ax[0, 0].set_title(f"J={curve.J}, k={curve.k}, alpha={curve.alpha}")
    return save(fig, path)


def plot_phase_diagram(rows, path):
    k = [r["k"] for r in rows]
    fig, ax = new_figure(1, 3, width=3.0, aspect=0.9)
    ax[0, 0].errorbar(k, [r["mu"] for r in rows], yerr=[r["mu_err"] for r in rows], fmt="o-")
    ax[0, 0].set_ylabel(r"$\mu_k$")
    ax[0, 1].plot(k, [r["r_sector"] for r in rows], "o-")
    ax[0, 1].axhline(2 * np.log(2) - 1, ls=":", color="0.5")
    ax[0, 1].set_ylabel(r"$\langle r\rangle$")
    ax[0, 2].plot(k, [r["mean_pr"] for r in rows], "o-")
    ax[0, 2].set_ylabel(r"$\langle PR\rangle$")
    for a in ax[0]:
        a.set_xlabel("k")
    return save(fig, path)
