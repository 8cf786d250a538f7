"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report. Monte Carlo criteria use fixed seeds; tolerances are stated inline.
"""

import hashlib
import shutil
import time

import numpy as np
import pytest

from oracles import dft_field, permutation_moran_null

from hybridspec.cli import main
from hybridspec.graph import (
    DEFAULT_THRESHOLD,
    assemble_cube,
    invert,
    partial_strength,
    sup_statistic,
)
from hybridspec.model import (
    FrequencyGrid,
    HybridDataset,
    LatticeComponent,
    MarkedPattern,
    Window,
)
from hybridspec.preprocess import regular_grid_centroids
from hybridspec.sim import (
    derive_rng,
    sim_linked_pair,
    sim_poisson,
    sim_thomas,
    sim_white_noise_grid,
)
from hybridspec.spectral import (
    auto_periodogram,
    coherence,
    cross_periodogram,
    csr_bias,
    dft_lattice,
    dft_marked,
)
from hybridspec.stats import WeightMatrix, clark_evans, gearys_c, knn_weights, morans_i

GRID = FrequencyGrid.default()
WINDOW = Window.unit_square()


def report(criterion: int, detail: str) -> None:
    print(f"[criterion {criterion:2d}] PASS — {detail}")


def sup_pair_value(dataset: HybridDataset) -> np.ndarray:
    inv = invert(assemble_cube(dataset))
    return sup_statistic(partial_strength(inv), inv).values


def test_criterion_01_dft_oracle_equivalence():
    """50 random marked patterns (n <= 64): DFT matches the term-sum oracle
    to 1e-12 relative error at every grid frequency, in under 10 s."""
    t0 = time.perf_counter()
    rng = derive_rng(101)
    worst = 0.0
    for rep in range(50):
        n = int(rng.integers(1, 65))
        xy = rng.uniform(size=(n, 2))
        if rep % 2 == 0:
            marks = np.ones(n)
            kind = "point-derived"
        else:
            marks = rng.normal(size=n)
            marks -= marks.mean()
            kind = "lattice-derived"
        pat = MarkedPattern(f"r{rep}", xy, marks, kind)
        field = dft_marked(pat, GRID)
        oracle = dft_field(xy, marks, GRID.p_values, GRID.q_values)
        scale = max(np.abs(marks).sum(), 1.0)  # attainable magnitude of F
        worst = max(worst, np.abs(field - oracle).max() / scale)
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-12
    assert elapsed < 10.0
    report(1, f"50 patterns, worst relative error {worst:.2e}, {elapsed:.1f}s")


def test_criterion_02_csr_point_spectrum():
    """100 Poisson patterns (n ~ 500): grid-mean auto-periodogram (DC excluded)
    within 10% of n, matching the flat spectrum f = lambda of a process with
    vanishing covariance density. Under 60 s."""
    t0 = time.perf_counter()
    dc = GRID.dc_index()
    ratios = []
    for rep in range(100):
        pts = sim_poisson(500.0, WINDOW, seed=20000 + rep)
        pat = MarkedPattern(pts.name, pts.locations, np.ones(pts.n), "point-derived")
        pg = auto_periodogram(dft_marked(pat, GRID))
        mask = np.ones(pg.shape, bool)
        mask[dc] = False
        ratios.append(pg[mask].mean() / pts.n)
    elapsed = time.perf_counter() - t0
    mean_ratio = float(np.mean(ratios))
    assert abs(mean_ratio - 1.0) <= 0.10
    assert elapsed < 60.0
    report(2, f"mean periodogram / n = {mean_ratio:.4f}, {elapsed:.1f}s")


def test_criterion_03_white_noise_lattice_spectrum():
    """100 replicates of a 32x32 unit-variance white-noise lattice: mean native
    periodogram (excluding (0,0)) within 10% of 1; exactly 0 at (0,0)."""
    means = []
    for rep in range(100):
        lat = sim_white_noise_grid(32, 32, sigma2=1.0, seed=30000 + rep)
        lat_dm = LatticeComponent(
            name=lat.name,
            ids=lat.ids,
            centroids=lat.centroids,
            values=lat.values - lat.values.mean(),
            grid_shape=lat.grid_shape,
        )
        field, _ = dft_lattice(lat_dm)
        pg = auto_periodogram(field)
        assert pg[0, 0] == 0.0
        mask = np.ones(pg.shape, bool)
        mask[0, 0] = False
        means.append(pg[mask].mean())
    mean_pg = float(np.mean(means))
    assert abs(mean_pg - 1.0) <= 0.10
    report(3, f"mean periodogram = {mean_pg:.4f}, f(0,0) = 0 exactly")


def test_criterion_04_raw_coherence_unity():
    """Unsmoothed coherence equals 1 (within 1e-8) at every defined frequency."""
    pts = sim_poisson(300.0, WINDOW, seed=404, name="a")
    lat = sim_white_noise_grid(8, 8, seed=405, name="b", window=WINDOW)
    ds = HybridDataset(window=WINDOW, components=(pts, lat))
    cube = assemble_cube(ds, smoothed=False)
    coh = coherence(
        cube.pair(0, 1),
        cube.pair(0, 0).real,
        cube.pair(1, 1).real,
        smoothed=False,
        allow_raw=True,
    )
    defined = ~np.isnan(coh)
    assert defined.sum() > 0.9 * coh.size
    worst = np.abs(coh[defined] - 1.0).max()
    assert worst < 1e-8
    report(4, f"{int(defined.sum())} defined frequencies, max |coh - 1| = {worst:.1e}")


def test_criterion_05_symmetries():
    """Conjugate symmetry of cross-periodograms (1e-14), the lattice
    index-reflection symmetry, and Hermitian smoothed cubes (1e-10)."""
    rng = derive_rng(505)
    # marked-pattern cross-periodograms
    xy_i, xy_j = rng.uniform(size=(40, 2)), rng.uniform(size=(50, 2))
    fi = dft_marked(MarkedPattern("i", xy_i, np.ones(40), "point-derived"), GRID)
    fj = dft_marked(MarkedPattern("j", xy_j, np.ones(50), "point-derived"), GRID)
    asym = np.abs(cross_periodogram(fi, fj) - np.conj(cross_periodogram(fj, fi))).max()
    scale = max(np.abs(fi).max() * np.abs(fj).max(), 1.0)
    assert asym <= 1e-14 * scale

    # lattice periodogram reflection symmetry
    lat = sim_white_noise_grid(6, 8, sigma2=2.0, seed=506)
    lat = LatticeComponent(
        name=lat.name,
        ids=lat.ids,
        centroids=lat.centroids,
        values=lat.values - lat.values.mean(),
        grid_shape=lat.grid_shape,
    )
    field, _ = dft_lattice(lat)
    pg = auto_periodogram(field)
    l1, l2 = pg.shape
    for p in range(l1):
        for q in range(l2):
            assert pg[(l1 - p) % l1, q] == pytest.approx(pg[p, (l2 - q) % l2], abs=1e-10)

    # Hermitian smoothed cube
    comps = (
        sim_poisson(400.0, WINDOW, seed=507, name="a"),
        sim_poisson(350.0, WINDOW, seed=508, name="b"),
        sim_white_noise_grid(16, 16, seed=509, name="c", window=WINDOW),
    )
    cube = assemble_cube(HybridDataset(window=WINDOW, components=comps))
    herm = np.abs(cube.values - np.conj(np.swapaxes(cube.values, 2, 3))).max()
    assert herm <= 1e-10
    report(5, f"cross asymmetry {asym:.1e}, Hermitian defect {herm:.1e}")


def test_criterion_06_bivariate_reduction():
    """For d = 2 the partial statistic equals the marginal coherency modulus
    at every valid frequency within 1e-10."""
    pts, lat = sim_linked_pair(400.0, cells=8, seed=606, window=WINDOW)
    ds = HybridDataset(window=WINDOW, components=(pts, lat))
    cube = assemble_cube(ds)
    inv = invert(cube)
    assert inv.valid.all() and not inv.ridged.any()
    s = partial_strength(inv)
    f = cube.values
    marginal = np.abs(f[..., 0, 1]) / np.sqrt(f[..., 0, 0].real * f[..., 1, 1].real)
    worst = np.abs(s[..., 0, 1] - marginal).max()
    assert worst <= 1e-10
    report(6, f"max |partial - marginal| = {worst:.1e} over {s.shape[0] * s.shape[1]} frequencies")


def test_criterion_07_graph_null_calibration():
    """4-component CSR hybrid (2 Poisson + 2 white-noise lattices), default
    smoothing, xi = 0.3: empty graph in >= 80% of 100 replicates."""
    reps = 100
    empty = 0
    false_edges = 0
    for rep in range(reps):
        comps = (
            sim_poisson(500.0, WINDOW, seed=70000 + rep, name="p1"),
            sim_poisson(500.0, WINDOW, seed=71000 + rep, name="p2"),
            sim_white_noise_grid(32, 32, sigma2=1.0, seed=72000 + rep, name="x1", window=WINDOW),
            sim_white_noise_grid(32, 32, sigma2=1.0, seed=73000 + rep, name="x2", window=WINDOW),
        )
        ds = HybridDataset(window=WINDOW, components=comps)
        sup = sup_pair_value(ds)
        n_edges = int((sup[np.triu_indices(4, 1)] >= DEFAULT_THRESHOLD).sum())
        false_edges += n_edges
        empty += n_edges == 0
    rate = empty / reps
    false_edge_rate = false_edges / (reps * 6)
    assert rate >= 0.80
    report(
        7,
        f"empty graph in {empty}/{reps} replicates, "
        f"false-edge rate {false_edge_rate:.3f} per pair",
    )


def test_criterion_08_graph_positive_control():
    """Linked point-lattice pair (n ~ 500, 8x8 cells, zero noise): edge found in
    >= 90% of replicates; independently re-drawn lattice loses it in >= 80%."""
    reps = 100
    detected = 0
    broken = 0
    for rep in range(reps):
        pts, lat = sim_linked_pair(500.0, cells=8, seed=80000 + rep, window=WINDOW)
        ds = HybridDataset(window=WINDOW, components=(pts, lat))
        detected += sup_pair_value(ds)[0, 1] >= DEFAULT_THRESHOLD

        _, independent = sim_linked_pair(500.0, cells=8, seed=85000 + rep, window=WINDOW)
        ds0 = HybridDataset(window=WINDOW, components=(pts, independent))
        broken += sup_pair_value(ds0)[0, 1] < DEFAULT_THRESHOLD
    assert detected >= 0.90 * reps
    assert broken >= 0.80 * reps
    report(8, f"edge detected {detected}/{reps}, broken by re-draw {broken}/{reps}")


def test_criterion_09_clark_evans():
    """CSR: CEI in [0.9, 1.1] in >= 90% of 200 runs; Thomas clusters: CEI < 1
    in >= 95% of 200 runs."""
    csr_in_band = 0
    for rep in range(200):
        pts = sim_poisson(500.0, WINDOW, seed=90000 + rep)
        csr_in_band += 0.9 <= clark_evans(pts.locations, WINDOW) <= 1.1
    clustered = 0
    for rep in range(200):
        pts = sim_thomas(25.0, 20.0, 0.02, WINDOW, seed=95000 + rep)
        clustered += pts.n >= 2 and clark_evans(pts.locations, WINDOW) < 1.0
    assert csr_in_band >= 0.90 * 200
    assert clustered >= 0.95 * 200
    report(9, f"CSR in band {csr_in_band}/200, Thomas clustered {clustered}/200")


def test_criterion_10_moran_geary_nulls():
    """Permutation mean of Moran's I within 3 SE of -1/(n-1); the two-site
    closed forms I = -1 and C = 1 hold to 1e-12."""
    pair_w = WeightMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]), "raw", "manual")
    assert morans_i([1.0, -1.0], pair_w) == pytest.approx(-1.0, abs=1e-12)
    assert gearys_c([1.0, -1.0], pair_w) == pytest.approx(1.0, abs=1e-12)

    rng = derive_rng(1010)
    n = 49
    xy = regular_grid_centroids(7, 7)
    values = rng.normal(size=n)
    w = knn_weights(xy, k=4)
    null = permutation_moran_null(values, w.weights, n_perm=500, seed=1011)
    se = null.std(ddof=1) / np.sqrt(len(null))
    deviation = abs(null.mean() - (-1.0 / (n - 1)))
    assert deviation <= 3.0 * se
    report(10, f"permutation mean deviation {deviation:.5f} <= 3 SE = {3 * se:.5f}")


def test_criterion_11_bias_formula():
    """CSR bias: 2*l1*l2*lambda^2 at w -> 0 and 0 at sinc zeros, to 1e-12."""
    l1, l2, lam = 3.0, 7.0, 2.5
    limit = csr_bias((0.0, 0.0), lam, l1, l2)
    assert limit == pytest.approx(2.0 * l1 * l2 * lam**2, abs=1e-12)
    for k in (1, 2, 5):
        wp = 2.0 * np.pi * k / l1  # l1*wp/2 = k*pi
        assert csr_bias((wp, 0.37), lam, l1, l2) == pytest.approx(0.0, abs=1e-12)
        wq = 2.0 * np.pi * k / l2
        assert csr_bias((0.37, wq), lam, l1, l2) == pytest.approx(0.0, abs=1e-12)
    assert csr_bias((0.1, 0.2), 0.0, l1, l2) == 0.0
    report(11, "zero-frequency limit and sinc zeros exact")


def test_criterion_12_pipeline_determinism(tmp_path):
    """Identical manifest/config/seed reruns produce byte-identical data
    artifacts (every CSV/JSON/DOT/TXT file)."""
    data_dir = tmp_path / "data"
    assert (
        main(
            [
                "simulate",
                "linked-pair",
                "--out",
                str(data_dir),
                "--lam",
                "400",
                "--grid",
                "8",
                "--seed",
                "12",
            ]
        )
        == 0
    )
    manifest = data_dir / "manifest.json"
    out = tmp_path / "run"

    def run_and_digest() -> dict:
        assert main(["run", str(manifest), "--out", str(out), "--seed", "12"]) == 0
        digests = {}
        for path in sorted(out.rglob("*")):
            if path.suffix in (".csv", ".json", ".dot", ".txt"):
                digests[str(path.relative_to(out))] = hashlib.sha256(
                    path.read_bytes()
                ).hexdigest()
        shutil.rmtree(out)
        return digests

    first = run_and_digest()
    second = run_and_digest()
    assert first == second
    assert len(first) >= 8
    report(12, f"{len(first)} data artifacts byte-identical across reruns")
