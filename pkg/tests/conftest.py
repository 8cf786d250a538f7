import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hybridspec.model import HybridDataset, Window
from hybridspec.sim import sim_poisson, sim_white_noise_grid


@pytest.fixture
def unit_window():
    return Window.unit_square()


@pytest.fixture
def small_hybrid(unit_window):
    """2-component hybrid: Poisson points + white-noise 8x8 lattice."""
    pts = sim_poisson(300.0, unit_window, seed=11, name="events")
    lat = sim_white_noise_grid(8, 8, sigma2=1.0, seed=12, name="noise", window=unit_window)
    return HybridDataset(window=unit_window, components=(pts, lat))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
