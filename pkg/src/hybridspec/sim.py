"""Seeded generators for ground-truth processes used in calibration tests.

All generators are pure functions of their parameters and a 64-bit seed:
the counter-based Philox bit generator is keyed on (seed, generator tag,
stream indices), so replicates can run in parallel with independently
derived streams and identical results regardless of schedule.
"""

from __future__ import annotations

import numpy as np

from .model import LatticeComponent, PointComponent, Window
from .preprocess import regular_grid_centroids

__all__ = [
    "derive_rng",
    "sim_poisson",
    "sim_white_noise_lattice",
    "sim_white_noise_grid",
    "sim_thomas",
    "sim_linked_pair",
]

# Stream tags keep the generators' outputs disjoint even under one seed.
_TAG_POISSON = 1
_TAG_WHITE = 2
_TAG_THOMAS = 3
_TAG_LINKED = 4


def derive_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator keyed on (seed, stream indices) via counter-based Philox."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((int(seed), *stream))))


def sim_poisson(
    intensity: float,
    window: Window | None = None,
    seed: int = 0,
    name: str = "poisson",
) -> PointComponent:
    """Homogeneous Poisson pattern: count ~ Poisson(intensity * |S|), uniform locations."""
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    window = window or Window.unit_square()
    rng = derive_rng(seed, _TAG_POISSON)
    n = int(rng.poisson(intensity * window.area))
    x = rng.uniform(window.x_min, window.x_max, size=n)
    y = rng.uniform(window.y_min, window.y_max, size=n)
    return PointComponent(name=name, locations=np.column_stack([x, y]))


def sim_white_noise_lattice(
    sites,
    sigma2: float = 1.0,
    seed: int = 0,
    name: str = "noise",
    grid_shape: tuple[int, int] | None = None,
) -> LatticeComponent:
    """i.i.d. zero-mean Gaussian values at the given (id, (x, y)) sites."""
    if sigma2 <= 0:
        raise ValueError("variance must be positive")
    ids = tuple(s[0] for s in sites)
    centroids = np.asarray([s[1] for s in sites], dtype=float)
    rng = derive_rng(seed, _TAG_WHITE)
    values = rng.normal(0.0, np.sqrt(sigma2), size=len(ids))
    return LatticeComponent(
        name=name, ids=ids, centroids=centroids, values=values, grid_shape=grid_shape
    )


def sim_white_noise_grid(
    l1: int,
    l2: int,
    sigma2: float = 1.0,
    seed: int = 0,
    name: str = "noise",
    window: Window | None = None,
) -> LatticeComponent:
    """Gaussian white noise on a regular l1 x l2 grid (cell-center centroids)."""
    window = window or Window(0.0, 0.0, float(l1), float(l2))
    centroids = regular_grid_centroids(l1, l2, window)
    sites = [(f"c{i}", tuple(c)) for i, c in enumerate(centroids)]
    return sim_white_noise_lattice(
        sites, sigma2=sigma2, seed=seed, name=name, grid_shape=(l1, l2)
    )


def sim_thomas(
    kappa: float,
    mu: float,
    sigma: float,
    window: Window | None = None,
    seed: int = 0,
    name: str = "thomas",
) -> PointComponent:
    """Thomas cluster process: Poisson parents, Gaussian-displaced offspring.

    Parents ~ Poisson(kappa * |S|) uniform in the window; each spawns a
    Poisson(mu) number of offspring displaced by N(0, sigma^2 I). Offspring
    falling outside the window are discarded (no toroidal wrapping), which
    slightly thins clusters near the border.
    """
    if min(kappa, mu, sigma) <= 0:
        raise ValueError("kappa, mu and sigma must be positive")
    window = window or Window.unit_square()
    rng = derive_rng(seed, _TAG_THOMAS)
    n_parents = int(rng.poisson(kappa * window.area))
    px = rng.uniform(window.x_min, window.x_max, size=n_parents)
    py = rng.uniform(window.y_min, window.y_max, size=n_parents)
    counts = rng.poisson(mu, size=n_parents)
    total = int(counts.sum())
    offsets = rng.normal(0.0, sigma, size=(total, 2))
    parents = np.repeat(np.column_stack([px, py]), counts, axis=0)
    pts = parents + offsets
    keep = (
        (pts[:, 0] >= window.x_min)
        & (pts[:, 0] <= window.x_max)
        & (pts[:, 1] >= window.y_min)
        & (pts[:, 1] <= window.y_max)
    )
    return PointComponent(name=name, locations=pts[keep])


def sim_linked_pair(
    intensity: float,
    cells: int = 8,
    noise_sigma: float = 0.0,
    window: Window | None = None,
    seed: int = 0,
    names: tuple[str, str] = ("events", "cell_counts"),
) -> tuple[PointComponent, LatticeComponent]:
    """Positive-control pair: a Poisson pattern and its own cell counts.

    The lattice value of each cell of a cells x cells grid is the number of
    points it contains, plus optional N(0, noise_sigma^2) perturbation; with
    zero noise the values sum to the point count exactly and the pair is
    cross-dependent by construction.
    """
    if cells < 2:
        raise ValueError("need a grid of at least 2 x 2 cells")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    window = window or Window.unit_square()
    rng = derive_rng(seed, _TAG_LINKED)
    n = int(rng.poisson(intensity * window.area))
    x = rng.uniform(window.x_min, window.x_max, size=n)
    y = rng.uniform(window.y_min, window.y_max, size=n)
    points = PointComponent(name=names[0], locations=np.column_stack([x, y]))

    ix = np.minimum(((x - window.x_min) / window.l1 * cells).astype(int), cells - 1)
    iy = np.minimum(((y - window.y_min) / window.l2 * cells).astype(int), cells - 1)
    counts = np.zeros((cells, cells))
    np.add.at(counts, (ix, iy), 1.0)
    values = counts.ravel()  # s1-major, matching regular_grid_centroids
    if noise_sigma > 0:
        values = values + rng.normal(0.0, noise_sigma, size=values.size)
    centroids = regular_grid_centroids(cells, cells, window)
    ids = tuple(f"c{i}" for i in range(values.size))
    lattice = LatticeComponent(
        name=names[1],
        ids=ids,
        centroids=centroids,
        values=values,
        grid_shape=(cells, cells),
    )
    return points, lattice
