"""Static figure rendering from validated result bundles.

Each plotting function writes the figure twice, as <out_path>.svg and
<out_path>.png, and returns the list of written paths.  Styling is fixed
so identical bundles regenerate byte-identical SVG output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import PlotsError, ResultBundle

_STYLE = {
    "figure.figsize": (10.0, 4.2),
    "figure.dpi": 110,
    "svg.hashsalt": "fpplab-plots",
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _save(fig, out_path) -> list[Path]:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    base = out_path.with_suffix("")
    written = []
    for ext in (".svg", ".png"):
        target = base.with_suffix(ext)
        fig.savefig(target, metadata={"Date": None} if ext == ".svg" else None)
        written.append(target)
    plt.close(fig)
    return written


def plot_tightness(bundle: ResultBundle, out_path) -> list[Path]:
    """Spread (r_epsilon and IQR) vs level, plus centered histograms.

    Requires at least three levels and the tightness block of the
    summary; the raw CSV values feed only the histogram panel.
    """
    ns = bundle.n_values()
    if len(ns) < 3:
        raise PlotsError(f"tightness figure needs >= 3 levels, got {ns}")
    summary = bundle.summary
    tight = summary.get("tightness")
    stats = summary.get("stats")
    if tight is None or stats is None:
        raise PlotsError(
            "summary.json carries no tightness diagnostic for this bundle")
    grid = tight["n_grid"]
    r_eps = tight["r_epsilon"]
    iqrs = [stats[str(n)]["iqr"] for n in grid]
    means = {n: stats[str(n)]["mean"] for n in grid}

    with plt.rc_context(_STYLE):
        fig, (ax_spread, ax_hist) = plt.subplots(1, 2)
        ax_spread.plot(grid, r_eps, "o-", label=f"r at eps={tight['epsilon']:g}")
        ax_spread.plot(grid, iqrs, "s--", label="IQR")
        lo, hi = tight["slope_ci"]
        ax_spread.set_title(
            f"spread vs level (slope {tight['slope']:.4f}, "
            f"95% CI [{lo:.4f}, {hi:.4f}])")
        ax_spread.set_xlabel("level n")
        ax_spread.set_ylabel("spread")
        ax_spread.legend()

        finite_span = 0.0
        for n in grid:
            centered = np.asarray(bundle.values_at(n)) - means[n]
            finite_span = max(finite_span, float(np.ptp(centered)))
        # degenerate (constant-law) samples still get a visible bar
        span = finite_span if finite_span > 0 else 1.0
        bins = np.linspace(-0.75 * span, 0.75 * span, 41)
        for n in grid:
            centered = np.asarray(bundle.values_at(n)) - means[n]
            ax_hist.hist(centered, bins=bins, density=True, histtype="step",
                         label=f"n={n}")
        ax_hist.set_title("centered samples per level")
        ax_hist.set_xlabel("value - mean")
        ax_hist.set_ylabel("density")
        ax_hist.legend()
        fig.tight_layout()
        return _save(fig, out_path)


def plot_variance_scaling(bundle: ResultBundle, out_path) -> list[Path]:
    """Log-log variance plot with the summary's fitted slope and CI band.

    Uses the point-to-point scaling block when present, else the per-level
    variances of a simulation bundle.
    """
    summary = bundle.summary
    scaling = summary.get("variance_scaling")
    if scaling is not None:
        xs = scaling["distance_grid"]
        variances = scaling["variances"]
        slope = scaling["loglog_slope"]
        ci = scaling["loglog_slope_ci"]
        xlabel = "target distance m"
    elif summary.get("stats"):
        stats = summary["stats"]
        xs = sorted(int(k) for k in stats)
        variances = [stats[str(n)]["variance"] for n in xs]
        slope, ci = None, None
        xlabel = "level n"
    else:
        raise PlotsError("bundle carries no variance data")
    if not xs:
        raise PlotsError("variance grid is empty")
    if any(v <= 0 for v in variances):
        raise PlotsError("nonpositive variance cannot be drawn on log axes")

    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(variances, dtype=float))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        ax.plot(xs, variances, "o", label="variance")
        if slope is not None:
            intercept = float(np.mean(ly - slope * lx))
            xs_f = np.asarray(xs, dtype=float)
            ax.plot(xs_f, np.exp(intercept + slope * np.log(xs_f)), "-",
                    label=f"fit slope {slope:.3f}")
            lo, hi = ci
            band_lo = np.exp(intercept + lo * (np.log(xs_f) - lx.mean())
                             + slope * lx.mean())
            band_hi = np.exp(intercept + hi * (np.log(xs_f) - lx.mean())
                             + slope * lx.mean())
            ax.fill_between(xs_f, np.minimum(band_lo, band_hi),
                            np.maximum(band_lo, band_hi), alpha=0.2,
                            label=f"slope CI [{lo:.3f}, {hi:.3f}]")
            ax.set_title(f"variance scaling (log-log slope {slope:.3f})")
        else:
            ax.set_title("variance per level (log-log axes)")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("variance")
        ax.legend()
        fig.tight_layout()
        return _save(fig, out_path)
