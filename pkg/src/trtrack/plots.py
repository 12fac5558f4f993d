"""Figure rendering for the experiment report path.

Every plotting helper writes a PNG next to the delimited data it
illustrates and returns the file path.  Rendering uses the Agg backend so
the CLI works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_decay_curves(d_over_lambda, curves: dict, theory, path) -> Path:
    """Empirical TRRS-vs-distance curves with the theoretical decay overlay."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, vals in curves.items():
        ax.plot(d_over_lambda, vals, label=label, lw=1.2)
    ax.plot(d_over_lambda, theory, "k--", label="J0^2(kd)", lw=1.5)
    ax.set_xlabel("distance from focal spot (wavelengths)")
    ax.set_ylabel("TRRS")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_histogram(values, xlabel: str, path, reference: float | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=25, color="steelblue", edgecolor="white")
    if reference is not None:
        ax.axvline(reference, color="crimson", ls="--", label=f"truth {reference:g}")
        ax.legend(fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_cdf(errors_by_label: dict, xlabel: str, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, errs in errors_by_label.items():
        xs = np.sort(np.asarray(errs))
        ys = np.arange(1, len(xs) + 1) / len(xs)
        ax.step(xs, ys, where="post", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("empirical CDF")
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_speed_series(times, speeds, path, truth: float | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.plot(times, speeds, lw=0.8)
    if truth is not None:
        ax.axhline(truth, color="crimson", ls="--", lw=1)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("speed (m/s)")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_loss_sweep(rows, path) -> Path:
    rates = [r[0] for r in rows]
    means = [r[1] for r in rows]
    stds = [r[2] for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    ax1.plot(rates, means, "o-")
    ax1.set_xlabel("packet loss rate")
    ax1.set_ylabel("mean estimated distance (m)")
    ax1.grid(alpha=0.3)
    ax2.plot(rates, stds, "o-", color="darkorange")
    ax2.set_xlabel("packet loss rate")
    ax2.set_ylabel("std of estimate (m)")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_floorplan_traces(plan, traces: dict, path, truth=None) -> Path:
    fig, ax = plt.subplots(figsize=(7, 5))
    for x1, y1, x2, y2 in plan.walls:
        ax.plot([x1, x2], [y1, y2], color="black", lw=1.5)
    for lm in plan.landmarks:
        ax.plot(*lm.position, "s", color="gray", ms=5)
    if truth is not None:
        truth = np.asarray(truth)
        ax.plot(truth[:, 0], truth[:, 1], "g--", lw=1.2, label="ground truth")
    for label, tr in traces.items():
        tr = np.asarray(tr)
        ax.plot(tr[:, 0], tr[:, 1], lw=1.2, label=label)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
