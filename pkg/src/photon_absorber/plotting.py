"""Matplotlib renderings written alongside the CSV reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_excitation(times, n2_by_label: dict, path, title="Absorber excitation probability"):
    """Overlay <n2>(t) curves (one per label) and save to `path`."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    styles = ["-", "--", "-."]
    for i, (label, n2) in enumerate(n2_by_label.items()):
        ax.plot(times, n2, styles[i % len(styles)], label=label)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\langle n_2 \rangle$")
    ax.set_title(title)
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_schedules(times, schedules_by_label: dict, path):
    """Plot |coupling|(t) on a log scale for each labelled schedule."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, vals in schedules_by_label.items():
        mag = np.abs(np.asarray(vals, dtype=complex))
        ax.plot(times, mag, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("|coupling|")
    ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep(t_values, n2_finals, path):
    """Terminal excitation probability against the truncation time."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t_values, n2_finals, "o-")
    ax.set_xlabel("truncation time T")
    ax.set_ylabel(r"final $\langle n_2 \rangle$")
    ax.set_xscale("log")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
