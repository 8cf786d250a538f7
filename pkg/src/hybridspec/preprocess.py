"""Conversion of raw components to the canonical marked-pattern form.

Every component ends up as locations on the unit square with one real mark
per location: point components keep their event locations with the
auxiliary mark 1, lattice components contribute their (globally) demeaned
values at their centroids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Component, LatticeComponent, MarkedPattern, PointComponent, Window

__all__ = [
    "Polygon",
    "rescale_unit_square",
    "standardize_coords",
    "demean",
    "polygon_centroid",
    "to_marked_pattern",
    "regular_grid_centroids",
]


@dataclass(frozen=True)
class Polygon:
    """Planar polygon as a closed exterior ring plus optional closed hole rings."""

    exterior: tuple  # ((x, y), ...) with first == last
    holes: tuple = ()

    def __post_init__(self):
        ext = tuple((float(x), float(y)) for x, y in self.exterior)
        if len(ext) < 4 or ext[0] != ext[-1]:
            raise ValueError("polygon ring must be closed (first vertex == last vertex)")
        holes = tuple(tuple((float(x), float(y)) for x, y in ring) for ring in self.holes)
        for ring in holes:
            if len(ring) < 4 or ring[0] != ring[-1]:
                raise ValueError("polygon hole ring must be closed")
        object.__setattr__(self, "exterior", ext)
        object.__setattr__(self, "holes", holes)


def _ring_area_centroid(ring) -> tuple[float, float, float]:
    """Shoelace signed area and area-weighted centroid of one closed ring."""
    v = np.asarray(ring, dtype=float)
    x, y = v[:-1, 0], v[:-1, 1]
    xn, yn = v[1:, 0], v[1:, 1]
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    if a == 0.0:
        return 0.0, 0.0, 0.0
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return a, cx, cy


def polygon_centroid(poly: Polygon) -> tuple[float, float]:
    """Area-weighted centroid; hole areas subtract from the exterior."""
    a_ext, cx, cy = _ring_area_centroid(poly.exterior)
    area = abs(a_ext)
    if area == 0.0:
        raise ValueError("zero-area polygon")
    sx, sy, total = cx * area, cy * area, area
    for ring in poly.holes:
        a_h, hx, hy = _ring_area_centroid(ring)
        a_h = abs(a_h)
        sx -= hx * a_h
        sy -= hy * a_h
        total -= a_h
    if total <= 0.0:
        raise ValueError("zero-area polygon (holes cover the exterior)")
    return sx / total, sy / total


def rescale_unit_square(points: np.ndarray, window: Window) -> np.ndarray:
    """Affine map of window coordinates onto [0, 1]^2.

    x -> (x - x_min) / l1, y -> (y - y_min) / l2; raises if any point lies
    outside the window.
    """
    xy = np.asarray(points, dtype=float).reshape(-1, 2)
    if xy.size and not window.contains(xy).all():
        bad = xy[~window.contains(xy)][0]
        raise ValueError(f"point ({bad[0]:g}, {bad[1]:g}) outside window")
    out = np.empty_like(xy)
    out[:, 0] = (xy[:, 0] - window.x_min) / window.l1
    out[:, 1] = (xy[:, 1] - window.y_min) / window.l2
    return out


def standardize_coords(points: np.ndarray, n: int, l1: float, l2: float) -> np.ndarray:
    """Standardised coordinates x* = n x / l1, y* = n y / l2.

    Alternative anti-bias convention to unit-square rescaling; exposed for
    completeness, not used by the graph pipeline.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if l1 <= 0 or l2 <= 0:
        raise ValueError("side lengths must be positive")
    xy = np.asarray(points, dtype=float).reshape(-1, 2)
    out = np.empty_like(xy)
    out[:, 0] = n * xy[:, 0] / l1
    out[:, 1] = n * xy[:, 1] / l2
    return out


def demean(values) -> np.ndarray:
    """Subtract the global arithmetic mean; output sums to ~0."""
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValueError("empty value series")
    return v - v.mean()


def regular_grid_centroids(l1: int, l2: int, window: Window | None = None) -> np.ndarray:
    """Cell-center centroids of a full l1 x l2 grid.

    Centers are (s1 + 0.5, s2 + 0.5) in cell units, mapped into the window
    (default [0, l1] x [0, l2]). Ordering is s1-major to match value grids.
    """
    if window is None:
        window = Window(0.0, 0.0, float(l1), float(l2))
    s1, s2 = np.meshgrid(np.arange(l1), np.arange(l2), indexing="ij")
    cx = window.x_min + (s1.ravel() + 0.5) * window.l1 / l1
    cy = window.y_min + (s2.ravel() + 0.5) * window.l2 / l2
    return np.column_stack([cx, cy])


def to_marked_pattern(component: Component, window: Window) -> MarkedPattern:
    """Canonicalize one component to a marked pattern on the unit square.

    Point components keep their locations with the auxiliary mark 1; lattice
    components contribute demeaned values at their rescaled centroids.
    """
    if isinstance(component, PointComponent):
        xy = rescale_unit_square(component.locations, window)
        return MarkedPattern(
            name=component.name,
            xy=xy,
            marks=np.ones(component.n),
            kind="point-derived",
        )
    if isinstance(component, LatticeComponent):
        xy = rescale_unit_square(component.centroids, window)
        return MarkedPattern(
            name=component.name,
            xy=xy,
            marks=demean(component.values),
            kind="lattice-derived",
        )
    raise TypeError(f"unsupported component type {type(component).__name__}")
