"""Core domain types for multivariate spatial hybrid data.

A hybrid dataset mixes point-pattern components (event locations) and
lattice components (values attached to grid cells or polygon centroids)
observed over one shared rectangular window. All types are immutable
after construction; computation lives in the sibling modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Window",
    "PointComponent",
    "LatticeComponent",
    "Component",
    "HybridDataset",
    "MarkedPattern",
    "FrequencyGrid",
    "SpectraCube",
    "DependenceGraph",
    "Finding",
    "ValidationReport",
    "validate",
]

# Relative tolerance for the "marks sum to zero" invariant of demeaned marks.
DEMEAN_RTOL = 1e-9
# Hermitian-symmetry tolerance for assembled spectral matrices.
HERMITIAN_ATOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True, order="C")
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Window:
    """Rectangular observation window with sides l1 = x extent, l2 = y extent."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(
                f"degenerate window: [{self.x_min}, {self.x_max}] x "
                f"[{self.y_min}, {self.y_max}]"
            )

    @property
    def l1(self) -> float:
        return self.x_max - self.x_min

    @property
    def l2(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.l1 * self.l2

    def contains(self, xy: np.ndarray) -> np.ndarray:
        """Boolean mask of rows of ``xy`` inside the window (boundary inclusive)."""
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        return (
            (xy[:, 0] >= self.x_min)
            & (xy[:, 0] <= self.x_max)
            & (xy[:, 1] >= self.y_min)
            & (xy[:, 1] <= self.y_max)
        )

    @classmethod
    def unit_square(cls) -> "Window":
        return cls(0.0, 0.0, 1.0, 1.0)


@dataclass(frozen=True, eq=False)
class PointComponent:
    """A named point pattern: event locations in window coordinates."""

    name: str
    locations: np.ndarray  # (n, 2) float

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "locations", _readonly(loc))

    @property
    def n(self) -> int:
        return self.locations.shape[0]

    @property
    def kind(self) -> str:
        return "points"


@dataclass(frozen=True, eq=False)
class LatticeComponent:
    """A named lattice series: one real value per site, sites held as centroids.

    ``grid_shape`` is ``(l1, l2)`` for a regular lattice whose sites enumerate a
    full l1 x l2 grid of cells; ``None`` marks an irregular lattice (polygon
    centroids or arbitrary sites).
    """

    name: str
    ids: tuple
    centroids: np.ndarray  # (n, 2) float
    values: np.ndarray  # (n,) float
    grid_shape: tuple[int, int] | None = None

    def __post_init__(self):
        cen = np.asarray(self.centroids, dtype=float).reshape(-1, 2)
        val = np.asarray(self.values, dtype=float).reshape(-1)
        if cen.shape[0] != val.shape[0] or cen.shape[0] != len(self.ids):
            raise ValueError(f"component {self.name!r}: ids/centroids/values lengths differ")
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "centroids", _readonly(cen))
        object.__setattr__(self, "values", _readonly(val))
        if self.grid_shape is not None:
            l1, l2 = self.grid_shape
            object.__setattr__(self, "grid_shape", (int(l1), int(l2)))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def kind(self) -> str:
        return "lattice"

    def value_grid(self) -> np.ndarray:
        """Values arranged as an (l1, l2) array for a regular lattice.

        Column index s1 follows ascending centroid x, row index s2 ascending
        centroid y; raises if the sites do not enumerate a full grid.
        """
        if self.grid_shape is None:
            raise ValueError(f"component {self.name!r} is not a regular lattice")
        l1, l2 = self.grid_shape
        if self.n != l1 * l2:
            raise ValueError(
                f"component {self.name!r}: {self.n} sites cannot fill a {l1}x{l2} grid"
            )
        xs = np.unique(self.centroids[:, 0])
        ys = np.unique(self.centroids[:, 1])
        if len(xs) != l1 or len(ys) != l2:
            raise ValueError(f"component {self.name!r}: sites do not enumerate a full grid")
        s1 = np.searchsorted(xs, self.centroids[:, 0])
        s2 = np.searchsorted(ys, self.centroids[:, 1])
        grid = np.full((l1, l2), np.nan)
        grid[s1, s2] = self.values
        if np.isnan(grid).any():
            raise ValueError(f"component {self.name!r}: sites do not enumerate a full grid")
        return grid


Component = Union[PointComponent, LatticeComponent]


@dataclass(frozen=True, eq=False)
class HybridDataset:
    """Ordered collection of components over one window.

    Component order is declaration order and is never sorted; every matrix
    produced downstream indexes components in this order.
    """

    window: Window
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def names(self) -> tuple:
        return tuple(c.name for c in self.components)

    @property
    def kinds(self) -> tuple:
        return tuple(c.kind for c in self.components)

    def __getitem__(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True, eq=False)
class MarkedPattern:
    """Canonical form of one component: unit-square locations + one real mark each.

    ``kind`` records the origin: point-derived patterns carry the auxiliary
    mark 1 at every location; lattice-derived patterns carry demeaned values
    (marks sum to zero within DEMEAN_RTOL of the absolute mark mass).
    """

    name: str
    xy: np.ndarray  # (n, 2) float in [0, 1]^2
    marks: np.ndarray  # (n,) float
    kind: str  # "point-derived" | "lattice-derived"

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=float).reshape(-1, 2)
        marks = np.asarray(self.marks, dtype=float).reshape(-1)
        if xy.shape[0] != marks.shape[0]:
            raise ValueError(f"pattern {self.name!r}: xy/marks lengths differ")
        if xy.size and (xy.min() < 0.0 or xy.max() > 1.0):
            raise ValueError(f"pattern {self.name!r}: locations outside the unit square")
        if self.kind == "point-derived":
            if not np.all(marks == 1.0):
                raise ValueError(f"pattern {self.name!r}: point-derived marks must all be 1")
        elif self.kind == "lattice-derived":
            mass = np.abs(marks).sum()
            if abs(marks.sum()) > DEMEAN_RTOL * max(mass, 1.0):
                raise ValueError(f"pattern {self.name!r}: lattice-derived marks not demeaned")
        else:
            raise ValueError(f"pattern {self.name!r}: unknown kind {self.kind!r}")
        object.__setattr__(self, "xy", _readonly(xy))
        object.__setattr__(self, "marks", _readonly(marks))

    @property
    def n(self) -> int:
        return self.marks.shape[0]


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Integer frequency lattice: rows p (one-sided), columns q (two-sided)."""

    p_values: np.ndarray
    q_values: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_values, dtype=int).reshape(-1)
        q = np.asarray(self.q_values, dtype=int).reshape(-1)
        if p.size == 0 or q.size == 0:
            raise ValueError("empty frequency grid")
        object.__setattr__(self, "p_values", _readonly(p))
        object.__setattr__(self, "q_values", _readonly(q))

    @classmethod
    def default(cls, p_max: int = 16, q_min: int = -16, q_max: int = 15) -> "FrequencyGrid":
        return cls(np.arange(0, p_max + 1), np.arange(q_min, q_max + 1))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.p_values), len(self.q_values))

    def dc_index(self) -> tuple[int, int] | None:
        """(row, col) of the (0, 0) frequency, or None when outside the grid."""
        pi = np.where(self.p_values == 0)[0]
        qi = np.where(self.q_values == 0)[0]
        if len(pi) and len(qi):
            return int(pi[0]), int(qi[0])
        return None


@dataclass(frozen=True, eq=False)
class SpectraCube:
    """Per-frequency d x d spectral matrices over a FrequencyGrid.

    ``values[i, j]`` is the d x d matrix at frequency (p_values[i], q_values[j]).
    Matrices are Hermitian by construction; diagonals are real and, after
    smoothing with non-negative weights, non-negative.
    """

    grid: FrequencyGrid
    values: np.ndarray  # (P, Q, d, d) complex
    names: tuple
    smoothed: bool
    kernel_size: int | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape[:2] != self.grid.shape or v.shape[2] != v.shape[3]:
            raise ValueError("cube shape does not match grid / component count")
        if v.shape[2] != len(self.names):
            raise ValueError("cube dimension does not match component names")
        herm_err = np.abs(v - np.conj(np.swapaxes(v, 2, 3))).max() if v.size else 0.0
        if herm_err > HERMITIAN_ATOL:
            raise ValueError(f"cube not Hermitian: max asymmetry {herm_err:.3e}")
        object.__setattr__(self, "values", _readonly(v))
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def d(self) -> int:
        return self.values.shape[2]

    def pair(self, i: int, j: int) -> np.ndarray:
        """The (P, Q) cross-spectral field for component pair (i, j)."""
        return self.values[:, :, i, j]


@dataclass(frozen=True, eq=False)
class DependenceGraph:
    """Undirected dependence graph: a missing edge asserts conditional independence."""

    vertices: tuple
    edges: tuple  # tuples (i, j) of vertex indices, i < j
    sup_matrix: np.ndarray  # (d, d) real symmetric
    threshold: float
    argmax: np.ndarray | None = None  # (d, d, 2) int, per-pair argmax (p, q)
    kinds: tuple | None = None

    def __post_init__(self):
        sup = np.asarray(self.sup_matrix, dtype=float)
        d = len(self.vertices)
        if sup.shape != (d, d):
            raise ValueError("sup_matrix shape does not match vertex count")
        edges = tuple(sorted((min(i, j), max(i, j)) for i, j in self.edges))
        if any(i == j for i, j in edges):
            raise ValueError("self-loops are not allowed")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "sup_matrix", _readonly(sup))
        if self.argmax is not None:
            object.__setattr__(self, "argmax", _readonly(np.asarray(self.argmax, dtype=int)))
        if self.kinds is not None:
            object.__setattr__(self, "kinds", tuple(self.kinds))

    @property
    def d(self) -> int:
        return len(self.vertices)

    def edge_names(self) -> tuple:
        return tuple((self.vertices[i], self.vertices[j]) for i, j in self.edges)

    def isolated(self) -> tuple:
        touched = {v for e in self.edges for v in e}
        return tuple(self.vertices[i] for i in range(self.d) if i not in touched)


@dataclass(frozen=True)
class Finding:
    severity: str  # "fatal" | "warning"
    component: str | None
    message: str

    def __str__(self) -> str:
        where = f" [{self.component}]" if self.component else ""
        return f"{self.severity.upper()}{where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple

    @property
    def ok(self) -> bool:
        return not any(f.severity == "fatal" for f in self.findings)

    @property
    def fatal(self) -> tuple:
        return tuple(f for f in self.findings if f.severity == "fatal")

    @property
    def warnings(self) -> tuple:
        return tuple(f for f in self.findings if f.severity == "warning")


def validate(dataset: HybridDataset) -> ValidationReport:
    """Check a parsed dataset against the type invariants.

    The dataset is acceptable for analysis iff the report has no fatal
    findings. Duplicate point coordinates are flagged as warnings only:
    real data has ties even though the model assumes orderliness.
    """
    findings: list[Finding] = []
    w = dataset.window
    if not (w.x_max > w.x_min and w.y_max > w.y_min):
        findings.append(Finding("fatal", None, "window of zero area"))
    if dataset.d < 2:
        findings.append(Finding("fatal", None, "fewer than two components"))
    seen: set[str] = set()
    for comp in dataset.components:
        if comp.name in seen:
            findings.append(Finding("fatal", comp.name, "duplicate component name"))
        seen.add(comp.name)
        if comp.n == 0:
            findings.append(Finding("fatal", comp.name, "empty component"))
            continue
        if isinstance(comp, PointComponent):
            inside = w.contains(comp.locations)
            if not inside.all():
                k = int((~inside).sum())
                first = comp.locations[~inside][0]
                findings.append(
                    Finding(
                        "fatal",
                        comp.name,
                        f"{k} point(s) out of window, e.g. ({first[0]:g}, {first[1]:g})",
                    )
                )
            if comp.n > 1:
                uniq = len(np.unique(comp.locations, axis=0))
                if uniq < comp.n:
                    findings.append(
                        Finding(
                            "warning",
                            comp.name,
                            f"{comp.n - uniq} duplicate point coordinate(s)",
                        )
                    )
        else:
            inside = w.contains(comp.centroids)
            if not inside.all():
                k = int((~inside).sum())
                findings.append(Finding("fatal", comp.name, f"{k} centroid(s) out of window"))
            if len(set(comp.ids)) < comp.n:
                findings.append(Finding("fatal", comp.name, "duplicate site ids"))
            if comp.n > 0 and np.ptp(comp.values) == 0.0:
                findings.append(
                    Finding(
                        "fatal",
                        comp.name,
                        "degenerate component: constant values (zero spectrum after demeaning)",
                    )
                )
            if comp.grid_shape is not None:
                try:
                    comp.value_grid()
                except ValueError as exc:
                    findings.append(Finding("fatal", comp.name, str(exc)))
        if isinstance(comp, PointComponent) and comp.n == 1:
            findings.append(
                Finding("warning", comp.name, "single point: nearest-neighbour stats undefined")
            )
    return ValidationReport(tuple(findings))
