"""Descriptive spatial statistics: nearest-neighbour summaries, Clark-Evans
index, and global autocorrelation (Moran's I, Geary's C) over spatial weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .model import HybridDataset, LatticeComponent, PointComponent, Window

__all__ = [
    "WeightMatrix",
    "nn_distances",
    "nn_summary",
    "clark_evans",
    "knn_weights",
    "distance_band_weights",
    "morans_i",
    "gearys_c",
    "summary_table",
    "SUMMARY_COLUMNS",
]

DEFAULT_KNN = 4


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Non-negative spatial weights with zero diagonal.

    ``style`` is "raw" or "row-standardised"; row-standardised rows sum to 1
    (or 0 for isolates). ``construction`` records how the weights were built.
    """

    weights: np.ndarray  # (n, n) float
    style: str
    construction: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if (w < 0).any():
            raise ValueError("weights must be non-negative")
        if np.diag(w).any():
            raise ValueError("weights must have a zero diagonal")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def row_standardised(self) -> "WeightMatrix":
        sums = self.weights.sum(axis=1, keepdims=True)
        safe = np.where(sums > 0, sums, 1.0)
        return WeightMatrix(self.weights / safe, "row-standardised", self.construction)


def nn_distances(xy: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to its nearest neighbour."""
    pts = np.asarray(xy, dtype=float).reshape(-1, 2)
    if pts.shape[0] < 2:
        raise ValueError("need at least 2 points for nearest-neighbour distances")
    tree = cKDTree(pts)
    dist, _ = tree.query(pts, k=2)
    return dist[:, 1]


def nn_summary(xy: np.ndarray) -> tuple[float, float, float]:
    """(mean, median, interquartile range) of nearest-neighbour distances.

    Quartiles use linear interpolation (type 7), fixed for reproducibility.
    """
    d = nn_distances(xy)
    q25, q50, q75 = np.quantile(d, [0.25, 0.5, 0.75])
    return float(d.mean()), float(q50), float(q75 - q25)


def clark_evans(xy: np.ndarray, window: Window) -> float:
    """Clark-Evans index: observed mean NN distance over its CSR expectation.

    CEI = mean_d / (1 / (2 * sqrt(lambda))) with lambda = n / |S|. No edge
    correction is applied; values below 1 indicate clustering.
    """
    pts = np.asarray(xy, dtype=float).reshape(-1, 2)
    if window.area <= 0:
        raise ValueError("zero-area window")
    lam = pts.shape[0] / window.area
    mean_d = nn_distances(pts).mean()
    return float(mean_d * 2.0 * np.sqrt(lam))


def _pairwise_distances(xy: np.ndarray) -> np.ndarray:
    diff = xy[:, None, :] - xy[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def knn_weights(
    centroids: np.ndarray,
    k: int = DEFAULT_KNN,
    style: str = "row-standardised",
) -> WeightMatrix:
    """k-nearest-neighbour weights, symmetrised by max.

    w_ij = 1 iff j is among the k nearest neighbours of i (then mirrored).
    Distance ties are broken by site index, so duplicate centroids still give
    a deterministic (if arbitrary) neighbour set.
    """
    pts = np.asarray(centroids, dtype=float).reshape(-1, 2)
    n = pts.shape[0]
    if not (0 < k < n):
        raise ValueError(f"k must satisfy 0 < k < n (k={k}, n={n})")
    dist = _pairwise_distances(pts)
    np.fill_diagonal(dist, np.inf)
    w = np.zeros((n, n))
    for i in range(n):
        # stable argsort on (distance, index): deterministic under ties
        order = np.argsort(dist[i], kind="stable")
        w[i, order[:k]] = 1.0
    w = np.maximum(w, w.T)
    wm = WeightMatrix(w, "raw", f"knn(k={k})")
    if style == "row-standardised":
        return wm.row_standardised()
    if style == "raw":
        return wm
    raise ValueError(f"unknown weight style {style!r}")


def distance_band_weights(
    centroids: np.ndarray,
    radius: float,
    style: str = "row-standardised",
) -> WeightMatrix:
    """Binary weights within a fixed distance band (w_ij = 1 iff 0 < d_ij <= r)."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    pts = np.asarray(centroids, dtype=float).reshape(-1, 2)
    dist = _pairwise_distances(pts)
    w = (dist <= radius).astype(float)
    np.fill_diagonal(w, 0.0)
    wm = WeightMatrix(w, "raw", f"distance-band(r={radius:g})")
    if style == "row-standardised":
        return wm.row_standardised()
    if style == "raw":
        return wm
    raise ValueError(f"unknown weight style {style!r}")


def _check_values(values) -> np.ndarray:
    z = np.asarray(values, dtype=float).reshape(-1)
    if z.size < 2:
        raise ValueError("need at least 2 values")
    z = z - z.mean()
    if not z.any():
        raise ValueError("zero variance")
    return z


def morans_i(values, w: WeightMatrix) -> float:
    """Global Moran's I: (n / S0) * sum_ij w_ij z_i z_j / sum_i z_i^2."""
    z = _check_values(values)
    n = z.size
    if w.n != n:
        raise ValueError("weights dimension does not match values")
    s0 = w.total
    if s0 <= 0:
        raise ValueError("weights sum to zero")
    num = z @ w.weights @ z
    return float(n / s0 * num / (z @ z))


def gearys_c(values, w: WeightMatrix) -> float:
    """Global Geary's C: ((n-1) / (2 S0)) * sum_ij w_ij (z_i - z_j)^2 / sum_i z_i^2."""
    z = _check_values(values)
    n = z.size
    if w.n != n:
        raise ValueError("weights dimension does not match values")
    s0 = w.total
    if s0 <= 0:
        raise ValueError("weights sum to zero")
    diff2 = (z[:, None] - z[None, :]) ** 2
    num = (w.weights * diff2).sum()
    return float((n - 1) / (2.0 * s0) * num / (z @ z))


SUMMARY_COLUMNS = (
    "component",
    "kind",
    "n",
    "min",
    "q25",
    "median",
    "mean",
    "q75",
    "max",
    "intensity",
    "cei",
    "moran_i",
    "geary_c",
)


def _distribution(values: np.ndarray) -> dict:
    q25, q50, q75 = np.quantile(values, [0.25, 0.5, 0.75])
    return {
        "min": float(values.min()),
        "q25": float(q25),
        "median": float(q50),
        "mean": float(values.mean()),
        "q75": float(q75),
        "max": float(values.max()),
    }


def summary_table(
    dataset: HybridDataset,
    k: int = DEFAULT_KNN,
    exclude_zeros: bool = False,
) -> list[dict]:
    """Per-component summary rows (one dict per component, SUMMARY_COLUMNS keys).

    Point components: the distribution columns summarize nearest-neighbour
    distances; intensity is n / |S| and the Clark-Evans index is reported.
    Lattice components: the distribution columns summarize the site values and
    Moran's I / Geary's C are computed over row-standardised k-NN weights.
    ``exclude_zeros`` drops zero-valued sites from a lattice row entirely
    (summaries and autocorrelation alike). Unavailable cells are None.
    """
    rows = []
    for comp in dataset.components:
        row = dict.fromkeys(SUMMARY_COLUMNS)
        row["component"] = comp.name
        row["kind"] = comp.kind
        if isinstance(comp, PointComponent):
            row["n"] = comp.n
            row["intensity"] = comp.n / dataset.window.area
            if comp.n >= 2:
                row.update(_distribution(nn_distances(comp.locations)))
                row["cei"] = clark_evans(comp.locations, dataset.window)
        elif isinstance(comp, LatticeComponent):
            values = comp.values
            centroids = comp.centroids
            if exclude_zeros:
                keep = values != 0
                values = values[keep]
                centroids = centroids[keep]
            row["n"] = int(values.size)
            if values.size:
                row.update(_distribution(values))
            k_eff = min(k, values.size - 1)
            if k_eff >= 1:
                w = knn_weights(centroids, k=k_eff)
                try:
                    row["moran_i"] = morans_i(values, w)
                    row["geary_c"] = gearys_c(values, w)
                except ValueError:
                    pass  # constant values: leave autocorrelation cells empty
        rows.append(row)
    return rows
