import numpy as np
import pytest

from hybridspec.model import (
    FrequencyGrid,
    HybridDataset,
    LatticeComponent,
    MarkedPattern,
    PointComponent,
    SpectraCube,
    Window,
    validate,
)


def make_lattice(name="lat", values=(1.0, 2.0, 3.0, 4.0)):
    return LatticeComponent(
        name=name,
        ids=("a", "b", "c", "d"),
        centroids=[(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)],
        values=values,
        grid_shape=(2, 2),
    )


class TestWindow:
    def test_dimensions(self):
        w = Window(0, 0, 10, 20)
        assert w.l1 == 10 and w.l2 == 20 and w.area == 200

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            Window(0, 0, 0, 1)
        with pytest.raises(ValueError):
            Window(0, 5, 1, 5)

    def test_contains_boundary_inclusive(self):
        w = Window(0, 0, 1, 1)
        assert w.contains(np.array([[1.0, 1.0], [0.0, 0.0]])).all()
        assert not w.contains(np.array([[1.0001, 0.5]])).any()


class TestValidate:
    def test_well_formed_dataset_accepted(self, unit_window):
        ds = HybridDataset(
            window=unit_window,
            components=(
                PointComponent("pts", [(0.1, 0.2), (0.7, 0.8)]),
                make_lattice(),
            ),
        )
        report = validate(ds)
        assert report.ok
        assert len(report.findings) == 0

    def test_out_of_window_point_fatal(self, unit_window):
        ds = HybridDataset(
            window=unit_window,
            components=(PointComponent("pts", [(2.0, 2.0)]), make_lattice()),
        )
        report = validate(ds)
        assert not report.ok
        assert any("out of window" in f.message for f in report.fatal)

    def test_single_component_fatal(self, unit_window):
        ds = HybridDataset(window=unit_window, components=(make_lattice(),))
        report = validate(ds)
        assert not report.ok
        assert any("fewer than two" in f.message for f in report.fatal)

    def test_duplicate_points_warn_only(self, unit_window):
        ds = HybridDataset(
            window=unit_window,
            components=(
                PointComponent("pts", [(0.5, 0.5), (0.5, 0.5), (0.1, 0.1)]),
                make_lattice(),
            ),
        )
        report = validate(ds)
        assert report.ok
        assert any("duplicate point" in f.message for f in report.warnings)

    def test_constant_lattice_fatal(self, unit_window):
        ds = HybridDataset(
            window=unit_window,
            components=(
                PointComponent("pts", [(0.1, 0.2), (0.7, 0.8)]),
                make_lattice(values=(3.0, 3.0, 3.0, 3.0)),
            ),
        )
        assert not validate(ds).ok

    def test_duplicate_names_fatal(self, unit_window):
        ds = HybridDataset(
            window=unit_window,
            components=(
                PointComponent("x", [(0.1, 0.2)]),
                PointComponent("x", [(0.3, 0.4)]),
            ),
        )
        assert not validate(ds).ok

    def test_empty_component_fatal(self, unit_window):
        ds = HybridDataset(
            window=unit_window,
            components=(PointComponent("pts", np.empty((0, 2))), make_lattice()),
        )
        report = validate(ds)
        assert any("empty component" in f.message for f in report.fatal)


class TestComponents:
    def test_declaration_order_is_preserved(self, unit_window):
        comps = tuple(
            PointComponent(name, [(0.5, 0.5)]) for name in ("zebra", "alpha", "mid")
        )
        ds = HybridDataset(window=unit_window, components=comps)
        assert ds.names == ("zebra", "alpha", "mid")

    def test_arrays_are_frozen(self):
        comp = PointComponent("pts", [(0.1, 0.2)])
        with pytest.raises(ValueError):
            comp.locations[0, 0] = 9.0

    def test_value_grid_roundtrip(self):
        lat = make_lattice(values=(1.0, 2.0, 3.0, 4.0))
        grid = lat.value_grid()
        # centroids are s1-major: (0.25,0.25)->[0,0], (0.75,0.25)->[1,0], ...
        assert grid[0, 0] == 1.0 and grid[1, 0] == 2.0
        assert grid[0, 1] == 3.0 and grid[1, 1] == 4.0

    def test_value_grid_rejects_partial_grid(self):
        lat = LatticeComponent(
            name="bad",
            ids=("a", "b", "c"),
            centroids=[(0.25, 0.25), (0.75, 0.25), (0.25, 0.75)],
            values=[1.0, 2.0, 3.0],
            grid_shape=(2, 2),
        )
        with pytest.raises(ValueError):
            lat.value_grid()


class TestMarkedPattern:
    def test_point_derived_requires_unit_marks(self):
        with pytest.raises(ValueError):
            MarkedPattern("p", [(0.5, 0.5)], [2.0], "point-derived")

    def test_lattice_derived_requires_demeaned_marks(self):
        with pytest.raises(ValueError):
            MarkedPattern("l", [(0.2, 0.2), (0.4, 0.4)], [1.0, 1.0], "lattice-derived")
        MarkedPattern("l", [(0.2, 0.2), (0.4, 0.4)], [1.0, -1.0], "lattice-derived")

    def test_unit_square_enforced(self):
        with pytest.raises(ValueError):
            MarkedPattern("p", [(1.5, 0.5)], [1.0], "point-derived")


class TestSpectraCube:
    def test_hermitian_enforced(self):
        grid = FrequencyGrid.default(1, 0, 1)
        values = np.zeros(grid.shape + (2, 2), dtype=complex)
        values[..., 0, 1] = 1j
        values[..., 1, 0] = -1j  # conj(1j): Hermitian
        SpectraCube(grid=grid, values=values, names=("a", "b"), smoothed=True)
        values[..., 1, 0] = 1j  # breaks Hermitian symmetry
        with pytest.raises(ValueError):
            SpectraCube(grid=grid, values=values, names=("a", "b"), smoothed=True)

    def test_default_grid_ranges(self):
        grid = FrequencyGrid.default()
        assert grid.p_values[0] == 0 and grid.p_values[-1] == 16
        assert grid.q_values[0] == -16 and grid.q_values[-1] == 15
        assert grid.dc_index() == (0, 16)
