"""Static figure emission for pipeline reports.

Heatmaps of (smoothed) periodogram fields and a circular layout of the
dependence graph, written straight to PNG files next to the delimited
output. No interactive display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import DependenceGraph, FrequencyGrid

__all__ = ["save_field_heatmap", "save_graph_figure", "save_sup_heatmap"]

DPI = 150


def save_field_heatmap(
    path: Path,
    field: np.ndarray,
    grid: FrequencyGrid,
    title: str,
    log_scale: bool = True,
) -> None:
    """Heatmap of |field| over the (p, q) grid; log10 colour scale by default."""
    mag = np.abs(np.asarray(field, dtype=complex))
    if log_scale:
        with np.errstate(divide="ignore"):
            mag = np.log10(np.where(mag > 0, mag, np.nan))
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    q0, q1 = grid.q_values[0], grid.q_values[-1]
    p0, p1 = grid.p_values[0], grid.p_values[-1]
    im = ax.imshow(
        mag,
        origin="lower",
        aspect="auto",
        extent=(q0 - 0.5, q1 + 0.5, p0 - 0.5, p1 + 0.5),
        cmap="viridis",
    )
    ax.set_xlabel("q")
    ax.set_ylabel("p")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="log10 |f|" if log_scale else "|f|")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_sup_heatmap(path: Path, sup: np.ndarray, names, threshold: float) -> None:
    """Matrix view of the pairwise supremum statistic with the threshold marked."""
    m = np.asarray(sup, dtype=float).copy()
    np.fill_diagonal(m, np.nan)
    fig, ax = plt.subplots(figsize=(5.6, 4.8))
    im = ax.imshow(m, cmap="magma", vmin=0.0, vmax=max(1.0, np.nanmax(m)))
    ax.set_xticks(range(len(names)), names, rotation=90, fontsize=7)
    ax.set_yticks(range(len(names)), names, fontsize=7)
    ax.set_title(f"sup partial statistic (threshold {threshold:g})")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_graph_figure(path: Path, graph: DependenceGraph) -> None:
    """Dependence graph on a circular layout; edge width scales with sup."""
    d = graph.d
    angles = 2.0 * np.pi * np.arange(d) / max(d, 1)
    xs, ys = np.cos(angles), np.sin(angles)
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    for i, j in graph.edges:
        s = graph.sup_matrix[i, j]
        ax.plot(
            [xs[i], xs[j]],
            [ys[i], ys[j]],
            color="steelblue",
            linewidth=0.5 + 3.0 * s,
            zorder=1,
        )
        ax.annotate(
            f"{s:.2f}",
            (0.5 * (xs[i] + xs[j]), 0.5 * (ys[i] + ys[j])),
            fontsize=6,
            color="dimgray",
            ha="center",
        )
    point_like = [
        graph.kinds[i] == "points" if graph.kinds else True for i in range(d)
    ]
    colors = ["firebrick" if p else "darkgreen" for p in point_like]
    ax.scatter(xs, ys, s=220, c=colors, zorder=2)
    for i, name in enumerate(graph.vertices):
        ax.annotate(
            name,
            (1.12 * xs[i], 1.12 * ys[i]),
            ha="center",
            va="center",
            fontsize=8,
        )
    ax.set_xlim(-1.35, 1.35)
    ax.set_ylim(-1.35, 1.35)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(f"dependence graph (xi = {graph.threshold:g})")
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
