"""Manifest-driven dataset ingestion and delimited artifact writers.

Manifest (JSON): {"window": [x_min, y_min, x_max, y_max] | null,
"components": [{"kind": "points"|"lattice"|"polygons", "name": ...,
"file": ..., "grid": [l1, l2]?}, ...]}. File paths are resolved relative
to the manifest. Points CSV has columns name,x,y (the name column selects
the rows belonging to the component, so one file can feed several
components); lattice CSV has columns id,x,y,value; polygon input is a
GeoJSON-style FeatureCollection whose features carry a numeric "value"
property (values are attached to shoelace centroids).

All numeric output uses 17 significant digits so artifacts are
byte-reproducible and round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import HybridDataset, LatticeComponent, PointComponent, Window
from .preprocess import Polygon, polygon_centroid

__all__ = [
    "IngestError",
    "ingest",
    "read_points_csv",
    "read_lattice_csv",
    "read_polygons_geojson",
    "write_points_csv",
    "write_lattice_csv",
    "write_matrix_csv",
    "write_rows_csv",
    "fmt",
]


class IngestError(ValueError):
    """Malformed manifest or component file."""


def fmt(x) -> str:
    """Fixed numeric format for data files: 17 significant digits."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _parse_float(text: str, path: Path, line: int, column: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise IngestError(f"{path}:{line}: bad numeric value {text!r} in column {column!r}")


def read_points_csv(path: Path) -> dict[str, np.ndarray]:
    """Read a name,x,y CSV into {name: (n, 2) locations}."""
    groups: dict[str, list] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in ("name", "x", "y"):
            if col not in header:
                raise IngestError(f"{path}: points file missing column {col!r}")
        for lineno, row in enumerate(reader, start=2):
            if row["name"] is None or row["x"] is None or row["y"] is None:
                raise IngestError(f"{path}:{lineno}: short row")
            x = _parse_float(row["x"], path, lineno, "x")
            y = _parse_float(row["y"], path, lineno, "y")
            groups.setdefault(row["name"], []).append((x, y))
    return {name: np.asarray(pts, dtype=float) for name, pts in groups.items()}


def read_lattice_csv(path: Path) -> tuple[tuple, np.ndarray, np.ndarray]:
    """Read an id,x,y,value CSV into (ids, centroids, values)."""
    ids: list[str] = []
    cents: list[tuple[float, float]] = []
    vals: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in ("id", "x", "y", "value"):
            if col not in header:
                raise IngestError(f"{path}: lattice file missing column {col!r}")
        for lineno, row in enumerate(reader, start=2):
            if any(row[c] is None for c in ("id", "x", "y", "value")):
                raise IngestError(f"{path}:{lineno}: short row")
            ids.append(row["id"])
            cents.append(
                (
                    _parse_float(row["x"], path, lineno, "x"),
                    _parse_float(row["y"], path, lineno, "y"),
                )
            )
            vals.append(_parse_float(row["value"], path, lineno, "value"))
    return tuple(ids), np.asarray(cents, dtype=float), np.asarray(vals, dtype=float)


def read_polygons_geojson(path: Path) -> tuple[tuple, np.ndarray, np.ndarray]:
    """Centroids and values from a FeatureCollection of Polygon features."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("type") != "FeatureCollection":
        raise IngestError(f"{path}: expected a FeatureCollection")
    ids, cents, vals = [], [], []
    for idx, feature in enumerate(doc.get("features", [])):
        geom = feature.get("geometry") or {}
        if geom.get("type") != "Polygon":
            raise IngestError(f"{path}: feature {idx}: only Polygon geometries are supported")
        rings = geom.get("coordinates") or []
        if not rings:
            raise IngestError(f"{path}: feature {idx}: empty polygon")
        poly = Polygon(exterior=tuple(map(tuple, rings[0])),
                       holes=tuple(tuple(map(tuple, r)) for r in rings[1:]))
        props = feature.get("properties") or {}
        if "value" not in props:
            raise IngestError(f"{path}: feature {idx}: missing 'value' property")
        ids.append(str(props.get("id", idx)))
        cents.append(polygon_centroid(poly))
        vals.append(float(props["value"]))
    return tuple(ids), np.asarray(cents, dtype=float), np.asarray(vals, dtype=float)


def _component_window(entry: dict):
    win = entry.get("window")
    if win is None:
        return None
    return tuple(float(v) for v in win)


def ingest(manifest_path) -> HybridDataset:
    """Build a HybridDataset from a manifest file.

    The window comes from the manifest; when absent it defaults to the
    bounding box of all component coordinates. Component entries may not
    declare conflicting windows of their own.
    """
    manifest_path = Path(manifest_path)
    with open(manifest_path) as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{manifest_path}: invalid JSON ({exc})")
    entries = manifest.get("components")
    if not entries:
        raise IngestError(f"{manifest_path}: no components declared")
    base = manifest_path.parent

    windows = set()
    if manifest.get("window") is not None:
        windows.add(tuple(float(v) for v in manifest["window"]))
    for entry in entries:
        w = _component_window(entry)
        if w is not None:
            windows.add(w)
    if len(windows) > 1:
        raise IngestError(f"{manifest_path}: mixed windows declared")

    components = []
    all_xy = []
    for entry in entries:
        kind = entry.get("kind")
        name = entry.get("name")
        if not name:
            raise IngestError(f"{manifest_path}: component without a name")
        path = base / entry["file"]
        if kind == "points":
            groups = read_points_csv(path)
            if name not in groups:
                raise IngestError(f"{path}: no rows with name {name!r}")
            comp = PointComponent(name=name, locations=groups[name])
            all_xy.append(comp.locations)
        elif kind == "lattice":
            ids, cents, vals = read_lattice_csv(path)
            grid = entry.get("grid")
            comp = LatticeComponent(
                name=name,
                ids=ids,
                centroids=cents,
                values=vals,
                grid_shape=tuple(int(v) for v in grid) if grid else None,
            )
            all_xy.append(cents)
        elif kind == "polygons":
            ids, cents, vals = read_polygons_geojson(path)
            comp = LatticeComponent(name=name, ids=ids, centroids=cents, values=vals)
            all_xy.append(cents)
        else:
            raise IngestError(f"{manifest_path}: unknown component kind {kind!r}")
        components.append(comp)

    if windows:
        x0, y0, x1, y1 = next(iter(windows))
    else:
        stacked = np.vstack([xy for xy in all_xy if xy.size])
        x0, y0 = stacked.min(axis=0)
        x1, y1 = stacked.max(axis=0)
    try:
        window = Window(x0, y0, x1, y1)
    except ValueError as exc:
        raise IngestError(f"{manifest_path}: {exc}")
    return HybridDataset(window=window, components=tuple(components))


def write_points_csv(path: Path, name: str, locations: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "x", "y"])
        for x, y in np.asarray(locations, dtype=float):
            writer.writerow([name, fmt(x), fmt(y)])


def write_lattice_csv(path: Path, ids, centroids, values) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "x", "y", "value"])
        for sid, (x, y), v in zip(ids, np.asarray(centroids, dtype=float), values):
            writer.writerow([sid, fmt(x), fmt(y), fmt(v)])


def write_matrix_csv(path: Path, matrix: np.ndarray, labels) -> None:
    """Square labelled matrix (sup matrices and friends)."""
    m = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["", *labels])
        for label, row in zip(labels, m):
            writer.writerow([label, *[fmt(v) for v in row]])


def write_rows_csv(path: Path, rows: list[dict], columns) -> None:
    def cell(value):
        return value if isinstance(value, str) else fmt(value)

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([cell(row.get(c)) for c in columns])
