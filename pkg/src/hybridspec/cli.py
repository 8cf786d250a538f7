"""Command-line interface.

Subcommands: validate, stats, spectra, graph, simulate, run. Exit codes:
0 on success, 2 when the dataset fails validation, 1 on any other error.
Log verbosity is controlled by the HYBRIDSPEC_LOG environment variable
(DEBUG/INFO/WARNING/ERROR); there is no verbosity flag.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import graph as graph_mod
from . import io as io_mod
from . import sim, stats
from .model import FrequencyGrid, Window, validate
from .pipeline import (
    PipelineError,
    RunConfig,
    ValidationFailure,
    _pair_slug,
    _write_periodogram_csv,
    run_pipeline,
)
from .spectral import SmoothingKernel

log = logging.getLogger("hybridspec")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2


def _configure_logging() -> None:
    level = os.environ.get("HYBRIDSPEC_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pmax", type=int, default=16, help="largest p frequency (default 16)")
    p.add_argument("--qmin", type=int, default=-16, help="smallest q frequency (default -16)")
    p.add_argument("--qmax", type=int, default=15, help="largest q frequency (default 15)")
    p.add_argument(
        "--kernel",
        type=int,
        default=graph_mod.DEFAULT_KERNEL_SIZE,
        help=f"odd smoothing window size (default {graph_mod.DEFAULT_KERNEL_SIZE})",
    )
    p.add_argument(
        "--xi",
        type=float,
        default=graph_mod.DEFAULT_THRESHOLD,
        help=f"edge threshold on the sup statistic (default {graph_mod.DEFAULT_THRESHOLD})",
    )
    p.add_argument(
        "--ridge",
        type=float,
        default=graph_mod.DEFAULT_RIDGE,
        help="relative ridge for ill-conditioned spectral matrices",
    )
    p.add_argument(
        "--k", type=int, default=stats.DEFAULT_KNN, help="k for k-NN autocorrelation weights"
    )
    p.add_argument("--seed", type=int, default=0, help="seed recorded with the run")
    p.add_argument(
        "--exclude-zeros",
        action="store_true",
        help="drop zero-valued lattice sites from the stats table",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridspec",
        description="Spectral dependence-graph analysis of mixed point/lattice spatial data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="check a manifest's dataset")
    p_val.add_argument("manifest")

    p_stats = sub.add_parser("stats", help="write the per-component summary table")
    p_stats.add_argument("manifest")
    p_stats.add_argument("--out", required=True, help="output directory")
    p_stats.add_argument("--k", type=int, default=stats.DEFAULT_KNN)
    p_stats.add_argument("--exclude-zeros", action="store_true")

    p_spec = sub.add_parser("spectra", help="write smoothed periodogram grids")
    p_spec.add_argument("manifest")
    p_spec.add_argument("--out", required=True)
    _add_run_flags(p_spec)
    p_spec.add_argument("--no-plots", action="store_true", help="skip heatmap PNGs")

    p_graph = sub.add_parser("graph", help="build and export the dependence graph")
    p_graph.add_argument("manifest")
    p_graph.add_argument("--out", required=True)
    _add_run_flags(p_graph)
    p_graph.add_argument(
        "--format",
        choices=("json", "dot", "graphml"),
        action="append",
        help="graph format(s) to write (default: json and dot)",
    )

    p_sim = sub.add_parser("simulate", help="generate components in the standard CSV formats")
    p_sim.add_argument(
        "kind", choices=("poisson", "thomas", "white-noise", "linked-pair")
    )
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--name", default=None, help="component name (default: the kind)")
    p_sim.add_argument("--lam", type=float, default=100.0, help="intensity per unit area")
    p_sim.add_argument("--kappa", type=float, default=25.0, help="thomas parent intensity")
    p_sim.add_argument("--mu", type=float, default=10.0, help="thomas mean offspring count")
    p_sim.add_argument("--sigma", type=float, default=0.05, help="thomas dispersion")
    p_sim.add_argument("--sigma2", type=float, default=1.0, help="white-noise variance")
    p_sim.add_argument("--grid", type=int, default=8, help="cells per axis (lattice kinds)")
    p_sim.add_argument("--noise", type=float, default=0.0, help="linked-pair value noise sd")
    p_sim.add_argument(
        "--window",
        type=float,
        nargs=4,
        metavar=("XMIN", "YMIN", "XMAX", "YMAX"),
        default=(0.0, 0.0, 1.0, 1.0),
    )
    p_sim.add_argument("--seed", type=int, default=0)

    p_run = sub.add_parser("run", help="full pipeline: stats, spectra, graph, figures")
    p_run.add_argument("manifest")
    p_run.add_argument("--out", required=True)
    _add_run_flags(p_run)
    p_run.add_argument("--no-plots", action="store_true", help="skip figure PNGs")

    return parser


def _cmd_validate(args) -> int:
    dataset = io_mod.ingest(args.manifest)
    report = validate(dataset)
    for finding in report.findings:
        print(finding)
    if report.ok:
        print(f"OK: {dataset.d} components, window area {dataset.window.area:g}")
        return EXIT_OK
    print("REJECTED")
    return EXIT_INVALID


def _require_valid(dataset) -> None:
    report = validate(dataset)
    if not report.ok:
        for finding in report.fatal:
            print(finding, file=sys.stderr)
        raise ValidationFailure(report)


def _cmd_stats(args) -> int:
    dataset = io_mod.ingest(args.manifest)
    _require_valid(dataset)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = stats.summary_table(dataset, k=args.k, exclude_zeros=args.exclude_zeros)
    io_mod.write_rows_csv(out / "stats.csv", rows, stats.SUMMARY_COLUMNS)
    print(f"wrote {out / 'stats.csv'}")
    return EXIT_OK


def _spectra_objects(args):
    dataset = io_mod.ingest(args.manifest)
    _require_valid(dataset)
    grid = FrequencyGrid.default(args.pmax, args.qmin, args.qmax)
    kernel = SmoothingKernel.uniform(args.kernel)
    cube = graph_mod.assemble_cube(dataset, grid=grid, kernel=kernel)
    return dataset, grid, cube


def _cmd_spectra(args) -> int:
    dataset, grid, cube = _spectra_objects(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = dataset.names
    for i in range(cube.d):
        for j in range(i, cube.d):
            slug = _pair_slug(names[i], names[j])
            _write_periodogram_csv(out / f"periodogram_{slug}.csv", cube.pair(i, j), grid)
            if not args.no_plots:
                (out / "figures").mkdir(exist_ok=True)
                report.save_field_heatmap(
                    out / "figures" / f"periodogram_{slug}.png",
                    cube.pair(i, j),
                    grid,
                    f"smoothed periodogram {names[i]} x {names[j]}",
                )
    print(f"wrote periodograms for {cube.d * (cube.d + 1) // 2} pairs to {out}")
    return EXIT_OK


def _cmd_graph(args) -> int:
    dataset, grid, cube = _spectra_objects(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    inverse = graph_mod.invert(cube, ridge=args.ridge)
    strength = graph_mod.partial_strength(inverse)
    sup = graph_mod.sup_statistic(strength, inverse)
    io_mod.write_matrix_csv(out / "sup_matrix.csv", sup.values, dataset.names)
    dg = graph_mod.build_graph(sup, xi=args.xi, kinds=dataset.kinds)
    for fmt_name in args.format or ("json", "dot"):
        (out / f"graph.{fmt_name}").write_bytes(graph_mod.export_graph(dg, fmt_name))
    print(f"edges ({len(dg.edges)}):")
    for a, b in dg.edge_names():
        print(f"  {a} -- {b}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    window = Window(*args.window)
    name = args.name or args.kind.replace("-", "_")
    manifest: dict = {
        "window": list(args.window),
        "components": [],
    }
    if args.kind == "poisson":
        comp = sim.sim_poisson(args.lam, window, seed=args.seed, name=name)
        io_mod.write_points_csv(out / f"{name}.csv", name, comp.locations)
        manifest["components"].append({"kind": "points", "name": name, "file": f"{name}.csv"})
    elif args.kind == "thomas":
        comp = sim.sim_thomas(args.kappa, args.mu, args.sigma, window, seed=args.seed, name=name)
        io_mod.write_points_csv(out / f"{name}.csv", name, comp.locations)
        manifest["components"].append({"kind": "points", "name": name, "file": f"{name}.csv"})
    elif args.kind == "white-noise":
        comp = sim.sim_white_noise_grid(
            args.grid, args.grid, sigma2=args.sigma2, seed=args.seed, name=name, window=window
        )
        io_mod.write_lattice_csv(out / f"{name}.csv", comp.ids, comp.centroids, comp.values)
        manifest["components"].append(
            {
                "kind": "lattice",
                "name": name,
                "file": f"{name}.csv",
                "grid": [args.grid, args.grid],
            }
        )
    else:  # linked-pair
        pts, lat = sim.sim_linked_pair(
            args.lam,
            cells=args.grid,
            noise_sigma=args.noise,
            window=window,
            seed=args.seed,
            names=(f"{name}_points", f"{name}_counts"),
        )
        io_mod.write_points_csv(out / f"{pts.name}.csv", pts.name, pts.locations)
        io_mod.write_lattice_csv(out / f"{lat.name}.csv", lat.ids, lat.centroids, lat.values)
        manifest["components"] += [
            {"kind": "points", "name": pts.name, "file": f"{pts.name}.csv"},
            {
                "kind": "lattice",
                "name": lat.name,
                "file": f"{lat.name}.csv",
                "grid": [args.grid, args.grid],
            },
        ]
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.kind} component(s) and manifest to {out}")
    return EXIT_OK


def _cmd_run(args) -> int:
    config = RunConfig(
        manifest=args.manifest,
        out_dir=args.out,
        p_max=args.pmax,
        q_min=args.qmin,
        q_max=args.qmax,
        kernel_size=args.kernel,
        xi=args.xi,
        ridge=args.ridge,
        k_neighbors=args.k,
        seed=args.seed,
        exclude_zeros=args.exclude_zeros,
        plots=not args.no_plots,
    )
    summary = run_pipeline(config)
    print(f"artifacts in {summary['out_dir']}")
    print(f"edges ({len(summary['edges'])}):")
    for a, b in summary["edges"]:
        print(f"  {a} -- {b}")
    if summary["isolated"]:
        print("isolated: " + ", ".join(summary["isolated"]))
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "spectra": _cmd_spectra,
    "graph": _cmd_graph,
    "simulate": _cmd_simulate,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    _configure_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationFailure as exc:
        for finding in exc.report.fatal:
            print(finding, file=sys.stderr)
        print("REJECTED", file=sys.stderr)
        return EXIT_INVALID
    except PipelineError as exc:
        if isinstance(exc.cause, ValidationFailure):
            return EXIT_INVALID
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # argparse errors exit on their own
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
