"""Matplotlib figures written next to the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

COLORS = {"hill": "tab:blue", "dekkers": "tab:green", "dh": "tab:red", "odh": "gold"}


def _color(label: str):
    return COLORS.get(label.split(":")[0])


def plot_rmse_curves(report, path: str, log_scale: bool = True) -> str:
    """One panel per model with the RMSE curve of every estimator against kv(j)."""
    families = []
    for c in report.cells:
        if c.family not in families:
            families.append(c.family)
    fig, axes = plt.subplots(1, len(families), figsize=(5.5 * len(families), 4), squeeze=False)
    k = np.asarray(report.k_values)
    for ax, fam in zip(axes[0], families):
        for c in report.cells:
            if c.family != fam or not c.rmse:
                continue
            ax.plot(k, c.rmse, label=c.estimator, color=_color(c.estimator), lw=1.2)
        if log_scale:
            ax.set_yscale("log")
        ax.set_xlabel("k")
        ax.set_ylabel("RMSE")
        ax.set_title(f"Model {fam}")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_hill(ks, estimates, path: str, labels=None, truth=None) -> str:
    """gamma_hat against k for one or more estimators."""
    estimates = np.atleast_2d(np.asarray(estimates, dtype=float))
    labels = labels or [f"est{i}" for i in range(estimates.shape[0])]
    fig, ax = plt.subplots(figsize=(6, 4))
    for row, lab in zip(estimates, labels):
        ax.plot(ks, row, label=lab, color=_color(lab), lw=1.0)
    if truth is not None:
        ax.axhline(truth, color="k", ls="--", lw=0.8)
    ax.set_xlabel("k")
    ax.set_ylabel(r"$\hat\gamma$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_variance_profile(profile, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(profile.tau_grid, profile.v_values, lw=1.2)
    ax.axvline(profile.argmax_tau, color="tab:red", ls="--", lw=0.8)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$V_n(\tau, s)$")
    ax.set_title(f"s={profile.s:g}, k={profile.k}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
