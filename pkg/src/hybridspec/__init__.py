"""hybridspec: spectral dependence-graph analysis of mixed spatial data.

Estimates auto- and cross-spectral densities for multivariate spatial hybrid
data (point patterns mixed with lattice measurements over one window) and
builds an undirected dependence graph in which a missing edge asserts
conditional independence between two components given all others.
"""

from .model import (
    DependenceGraph,
    FrequencyGrid,
    HybridDataset,
    LatticeComponent,
    MarkedPattern,
    PointComponent,
    SpectraCube,
    ValidationReport,
    Window,
    validate,
)
from .preprocess import (
    Polygon,
    demean,
    polygon_centroid,
    regular_grid_centroids,
    rescale_unit_square,
    standardize_coords,
    to_marked_pattern,
)
from .spectral import (
    SmoothingKernel,
    auto_periodogram,
    coherence,
    cross_periodogram,
    csr_bias,
    decompose,
    dft_lattice,
    dft_marked,
    dft_points,
    isotropic_spectrum,
    lattice_frequency_grid,
    smooth,
)
from .graph import (
    DEFAULT_KERNEL_SIZE,
    DEFAULT_RIDGE,
    DEFAULT_THRESHOLD,
    InverseCube,
    SupMatrix,
    assemble_cube,
    build_graph,
    export_graph,
    invert,
    load_graph_json,
    partial_strength,
    sup_statistic,
)
from .stats import (
    WeightMatrix,
    clark_evans,
    distance_band_weights,
    gearys_c,
    knn_weights,
    morans_i,
    nn_distances,
    nn_summary,
    summary_table,
)
from .sim import (
    derive_rng,
    sim_linked_pair,
    sim_poisson,
    sim_thomas,
    sim_white_noise_grid,
    sim_white_noise_lattice,
)
from .io import ingest
from .pipeline import RunConfig, run_pipeline

__version__ = "0.1.0"
