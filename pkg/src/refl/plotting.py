"""Static SVG figures."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from refl.io import atomic_write_bytes  # noqa: E402

# stable element ids and no timestamp, so reruns give identical files
plt.rcParams["svg.hashsalt"] = "refl"


def save_svg(fig, path) -> None:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())


def plot_reflectivity(path, q, curves: dict, unit_line: bool = False, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, r in curves.items():
        ax.plot(q, r, label=label)
    if unit_line:
        ax.axhline(1.0, color="tab:orange", lw=1, ls="--", label="R = 1")
    ax.set_yscale("log")
    ax.set_xlabel(r"$q$ / $\AA^{-1}$")
    ax.set_ylabel(r"$R(q)$")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    save_svg(fig, path)


def plot_fit(path, dataset, model, logy: bool = True, xlabel=r"$q$ / $\AA^{-1}$",
             ylabel=r"$R(q)$", extra: dict | None = None) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(dataset.q, dataset.r, yerr=dataset.dr, fmt="o", ms=3, lw=0.8, label="data")
    for label, y in (extra or {}).items():
        ax.plot(dataset.q, y, lw=1, label=label)
    ax.plot(dataset.q, model, lw=1.5, label="best fit")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    save_svg(fig, path)


def plot_de_history(path, history: np.ndarray) -> None:
    """One line per candidate: lnL against generation."""
    fig, ax = plt.subplots(figsize=(6, 4))
    gens = np.arange(history.shape[0])
    for j in range(history.shape[1]):
        ax.plot(gens, history[:, j], lw=0.8)
    ax.set_xlabel("generation")
    ax.set_ylabel("log-likelihood")
    fig.tight_layout()
    save_svg(fig, path)


def plot_histograms(path, samples: np.ndarray, names) -> None:
    n = samples.shape[1]
    fig, axes = plt.subplots(1, n, figsize=(3 * n, 2.8), squeeze=False)
    for i, ax in enumerate(axes[0]):
        ax.hist(samples[:, i], bins=50, density=True, color="tab:green", alpha=0.7)
        ax.set_xlabel(names[i])
        ax.set_yticks([])
    fig.tight_layout()
    save_svg(fig, path)


def plot_pairs(path, samples: np.ndarray, names, max_points: int = 2000) -> None:
    n = samples.shape[1]
    stride = max(1, samples.shape[0] // max_points)
    pts = samples[::stride]
    fig, axes = plt.subplots(n, n, figsize=(2.2 * n, 2.2 * n), squeeze=False)
    for i in range(n):
        for j in range(n):
            ax = axes[i, j]
            if j > i:
                ax.set_axis_off()
                continue
            if i == j:
                ax.hist(pts[:, i], bins=30, color="tab:green", alpha=0.7)
            else:
                ax.plot(pts[:, j], pts[:, i], ",", color="tab:blue", alpha=0.5)
            if i == n - 1:
                ax.set_xlabel(names[j])
            if j == 0 and i > 0:
                ax.set_ylabel(names[i])
    fig.tight_layout()
    save_svg(fig, path)


def plot_predictive(path, dataset, best, curves, logy: bool = True,
                    xlabel=r"$q$ / $\AA^{-1}$", ylabel=r"$R(q)$") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for k, y in enumerate(curves):
        ax.plot(dataset.q, y, color="tab:green", alpha=0.15, lw=0.8,
                label="posterior samples" if k == 0 else None)
    ax.errorbar(dataset.q, dataset.r, yerr=dataset.dr, fmt="o", ms=3, lw=0.8,
                color="tab:blue", label="data")
    ax.plot(dataset.q, best, color="tab:orange", lw=1.5, label="optimum")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    save_svg(fig, path)
