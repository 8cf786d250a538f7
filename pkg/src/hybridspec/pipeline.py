"""End-to-end pipeline: ingest -> validate -> spectra -> stats -> graph -> disk.

Artifacts (all deterministic given manifest + config):
  config.json                       echo of the effective configuration
  validation.txt                    findings, one per line
  stats.csv                         per-component summary table
  periodogram_<i>__<j>.csv          smoothed cross-periodogram per pair (i <= j)
  sup_matrix.csv                    pairwise supremum of the partial statistic
  graph.json / graph.dot            thresholded dependence graph
  figures/*.png                     heatmaps + graph layout (optional)
"""

from __future__ import annotations

import csv
import json
import logging
import shutil
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import graph as graph_mod
from . import io as io_mod
from . import report, stats
from .model import FrequencyGrid, HybridDataset, validate
from .spectral import SmoothingKernel

__all__ = ["RunConfig", "PipelineError", "ValidationFailure", "run_pipeline"]

log = logging.getLogger("hybridspec")


@dataclass
class RunConfig:
    """Tunable knobs of the pipeline; defaults match the library defaults."""

    manifest: str
    out_dir: str
    p_max: int = 16
    q_min: int = -16
    q_max: int = 15
    kernel_size: int = graph_mod.DEFAULT_KERNEL_SIZE
    xi: float = graph_mod.DEFAULT_THRESHOLD
    ridge: float = graph_mod.DEFAULT_RIDGE
    k_neighbors: int = stats.DEFAULT_KNN
    seed: int = 0
    exclude_zeros: bool = False
    plots: bool = True

    def grid(self) -> FrequencyGrid:
        return FrequencyGrid.default(self.p_max, self.q_min, self.q_max)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"pipeline stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


class ValidationFailure(RuntimeError):
    def __init__(self, report_):
        super().__init__("dataset failed validation")
        self.report = report_


class _Workspace:
    """Tracks written artifacts so a failed run leaves no partial output."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.created_dir = not out_dir.exists()
        out_dir.mkdir(parents=True, exist_ok=True)
        self.paths: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        p.parent.mkdir(parents=True, exist_ok=True)
        self.paths.append(p)
        return p

    def rollback(self) -> None:
        for p in self.paths:
            p.unlink(missing_ok=True)
        if self.created_dir:
            shutil.rmtree(self.out_dir, ignore_errors=True)


def _pair_slug(a: str, b: str) -> str:
    safe = lambda s: "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in s)
    return f"{safe(a)}__{safe(b)}"


def _write_periodogram_csv(path: Path, field: np.ndarray, grid: FrequencyGrid) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "q", "re", "im"])
        for a, p in enumerate(grid.p_values):
            for b, q in enumerate(grid.q_values):
                v = field[a, b]
                writer.writerow([int(p), int(q), io_mod.fmt(v.real), io_mod.fmt(v.imag)])


def run_pipeline(config: RunConfig, dataset: HybridDataset | None = None) -> dict:
    """Run every stage and write all artifacts into ``config.out_dir``.

    Returns a summary dict (paths, edge list, false-run diagnostics). Any
    stage failure removes the partial outputs and raises PipelineError;
    validation failure raises ValidationFailure instead.
    """
    ws = _Workspace(Path(config.out_dir))
    stage = "setup"
    try:
        with open(ws.path("config.json"), "w") as fh:
            json.dump(asdict(config), fh, indent=2, sort_keys=True)
            fh.write("\n")

        stage = "ingest"
        if dataset is None:
            dataset = io_mod.ingest(config.manifest)

        stage = "validate"
        report_ = validate(dataset)
        with open(ws.path("validation.txt"), "w") as fh:
            for finding in report_.findings:
                fh.write(str(finding) + "\n")
            fh.write("OK\n" if report_.ok else "REJECTED\n")
        if not report_.ok:
            raise ValidationFailure(report_)
        for finding in report_.warnings:
            log.warning("%s", finding)

        stage = "stats"
        rows = stats.summary_table(
            dataset, k=config.k_neighbors, exclude_zeros=config.exclude_zeros
        )
        io_mod.write_rows_csv(ws.path("stats.csv"), rows, stats.SUMMARY_COLUMNS)

        stage = "spectra"
        grid = config.grid()
        kernel = SmoothingKernel.uniform(config.kernel_size)
        cube = graph_mod.assemble_cube(dataset, grid=grid, kernel=kernel)
        names = dataset.names
        for i in range(cube.d):
            for j in range(i, cube.d):
                slug = _pair_slug(names[i], names[j])
                _write_periodogram_csv(
                    ws.path(f"periodogram_{slug}.csv"), cube.pair(i, j), grid
                )

        stage = "graph"
        inverse = graph_mod.invert(cube, ridge=config.ridge)
        strength = graph_mod.partial_strength(inverse)
        sup = graph_mod.sup_statistic(strength, inverse)
        io_mod.write_matrix_csv(ws.path("sup_matrix.csv"), sup.values, names)
        dg = graph_mod.build_graph(sup, xi=config.xi, kinds=dataset.kinds)
        for fmt_name in ("json", "dot"):
            ws.path(f"graph.{fmt_name}").write_bytes(graph_mod.export_graph(dg, fmt_name))

        if config.plots:
            stage = "figures"
            for i in range(cube.d):
                for j in range(i, cube.d):
                    slug = _pair_slug(names[i], names[j])
                    report.save_field_heatmap(
                        ws.path(f"figures/periodogram_{slug}.png"),
                        cube.pair(i, j),
                        grid,
                        f"smoothed periodogram {names[i]} x {names[j]}",
                    )
            report.save_sup_heatmap(
                ws.path("figures/sup_matrix.png"), sup.values, names, config.xi
            )
            report.save_graph_figure(ws.path("figures/graph.png"), dg)

        return {
            "out_dir": str(ws.out_dir),
            "edges": dg.edge_names(),
            "isolated": dg.isolated(),
            "invalid_frequencies": int((~inverse.valid).sum()),
            "ridged_frequencies": int(inverse.ridged.sum()),
        }
    except ValidationFailure:
        raise
    except Exception as exc:  # roll back partial artifacts, keep the stage name
        ws.rollback()
        raise PipelineError(stage, exc) from exc
