"""Matplotlib renderings of the experiment outputs.

Every function writes a PNG next to the delimited data the CLI emits:
polar tuning curves per layer, the hue-distance correlation scatter,
and the reconstruction fit summary.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_TYPE_COLORS = {
    "L+M-": "#c0392b",
    "L-M+": "#27ae60",
    "S+(L+M)-": "#2980b9",
    "S-(L+M)+": "#b7950b",
    "red": "#e00000",
    "yellow": "#c8b400",
    "green": "#00a000",
    "cyan": "#00a0a0",
    "blue": "#0000e0",
    "magenta": "#c000c0",
}


def save_tuning_figure(sweep, path) -> None:
    """Polar plot of one layer's tuning curves over chromaticity angle."""
    fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(6, 6))
    theta = np.radians(sweep.mb_angles_deg)
    order = np.argsort(theta)
    for name in sweep.type_names:
        r = sweep.curve(name)
        t_closed = np.append(theta[order], theta[order][0])
        r_closed = np.append(r[order], r[order][0])
        ax.plot(t_closed, r_closed, label=name,
                color=_TYPE_COLORS.get(name, "black"), linewidth=1.4)
    ax.set_title(f"{sweep.layer} tuning over chromaticity angle")
    ax.legend(loc="upper right", bbox_to_anchor=(1.25, 1.1), fontsize=8)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)


def save_correlation_figure(report, path) -> None:
    """Scatter of hue distance against peak pixel distance, 15 pairs."""
    hue_d = np.array([p[2] for p in report.pairs])
    pix_d = np.array([p[3] for p in report.pairs])
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.scatter(hue_d, pix_d, color="#2c3e50", zorder=3)
    slope, intercept = np.polyfit(hue_d, pix_d, 1)
    grid = np.linspace(hue_d.min(), hue_d.max(), 2)
    ax.plot(grid, slope * grid + intercept, color="#c0392b",
            label=f"least squares (r = {report.r:.4f})")
    ax.set_xlabel("hue distance (deg)")
    ax.set_ylabel("peak distance (px)")
    ax.set_title("Hue distance vs. response-peak distance")
    ax.legend()
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)


def save_reconstruction_figure(report, path) -> None:
    """Per-sample prediction of the fitted model against the target."""
    preds = np.array([
        report.model.predict(row) for row in report.dataset.predictors
    ])
    n = preds.shape[0]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.scatter(np.arange(n), np.degrees(preds), s=8, color="#2980b9",
               label="per-sample prediction")
    ax.axhline(math.degrees(report.target_rad), color="#c0392b",
               label=f"target {report.hue_deg:.0f} deg")
    ax.set_xlabel("sample")
    ax.set_ylabel("reconstructed hue (deg)")
    names = [report.dataset.names[j] for j in report.model.selected]
    ax.set_title(
        "Hue reconstruction: selected " + (", ".join(names) if names else "none")
        + f", rms {report.model.residual_rms:.2e}"
    )
    ax.legend()
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
