"""
Tests for the finite element forward model.
"""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / 'src'))

from models import DimensionMismatch
from fem_forward import (
    IncompatibleGrids,
    SingularOperator,
    apply_forward,
    assemble_forward,
    assemble_matrices,
    build_grid,
    grid_distance_cells,
    locate_node,
    symmetric_sqrt,
    transfer_boundary_trace,
)


class TestGrid:
    """Tests for the uniform grid."""

    def test_boundary_order_small_grid(self):
        """Test the counterclockwise boundary listing on the 2 x 2 grid."""
        grid = build_grid(2)
        assert list(grid.boundary_index_map) == [0, 1, 2, 5, 8, 7, 6, 3]

    def test_boundary_nodes_lie_on_boundary(self):
        """Test that every listed boundary node has a coordinate equal to 0 or 1."""
        grid = build_grid(8)
        coords = grid.node_coordinates[grid.boundary_index_map]
        on_edge = np.isclose(coords, 0.0) | np.isclose(coords, 1.0)
        assert np.all(on_edge.any(axis=1))
        assert len(set(grid.boundary_index_map.tolist())) == 32

    def test_arclength(self):
        """Test that boundary node k sits at arc length k·h."""
        grid = build_grid(4)
        s = grid.boundary_arclength()
        assert s[0] == 0.0
        assert s[-1] == pytest.approx(4.0 - 0.25)

    def test_triangles_counterclockwise(self):
        """Test that there are 2N² triangles, all with positive orientation."""
        grid = build_grid(5)
        tri = grid.triangles()
        assert tri.shape == (50, 3)
        p = grid.node_coordinates[tri]
        det = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) \
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        assert np.all(det > 0)

    def test_too_small(self):
        """Test that N < 2 is rejected."""
        with pytest.raises(ValueError):
            build_grid(1)

    # --- Node Location Tests ---

    def test_locate_center(self):
        """Test that the center of the 16 x 16 grid is node 144."""
        grid = build_grid(16)
        assert locate_node(grid, (0.5, 0.5)) == 144
        assert grid.node_ij(144) == (8, 8)

    def test_locate_tie_prefers_smaller_index(self):
        """Test that a point halfway between two nodes snaps to the smaller index."""
        grid = build_grid(16)
        assert locate_node(grid, (1.0 / 32.0, 0.0)) == 0

    def test_locate_outside(self):
        """Test that points outside the unit square are rejected."""
        grid = build_grid(4)
        with pytest.raises(ValueError):
            locate_node(grid, (1.5, 0.5))

    def test_grid_distance(self):
        """Test the Chebyshev distance in cells."""
        grid = build_grid(16)
        a = grid.node_index(2, 3)
        b = grid.node_index(5, 4)
        assert grid_distance_cells(grid, a, b) == 3
        assert grid_distance_cells(grid, a, a) == 0


class TestAssembly:
    """Tests for the stiffness, mass and boundary mass matrices."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = build_grid(8)
        self.K, self.M, self.Mb = assemble_matrices(self.grid)

    def test_symmetry(self):
        """Test that all three matrices are symmetric."""
        assert abs(self.K - self.K.T).max() < 1e-12
        assert abs(self.M - self.M.T).max() < 1e-14
        np.testing.assert_allclose(self.Mb, self.Mb.T)

    def test_stiffness_annihilates_constants(self):
        """Test that K·1 = 0."""
        np.testing.assert_allclose(self.K @ np.ones(self.grid.node_count), 0.0, atol=1e-12)

    def test_mass_totals(self):
        """Test that the mass matrices integrate 1 to the area and the perimeter."""
        n = self.grid.node_count
        m = self.grid.boundary_node_count
        assert np.ones(n) @ (self.M @ np.ones(n)) == pytest.approx(1.0)
        assert np.ones(m) @ self.Mb @ np.ones(m) == pytest.approx(4.0)

    def test_boundary_mass_stencil(self):
        """Test the cyclic tridiagonal structure of M_∂."""
        h = self.grid.h
        assert self.Mb[0, 0] == pytest.approx(4 * h / 6)
        assert self.Mb[0, 1] == pytest.approx(h / 6)
        assert self.Mb[0, -1] == pytest.approx(h / 6)
        assert self.Mb[0, 2] == 0.0

    def test_symmetric_sqrt(self):
        """Test that the square root squares back to M_∂."""
        root = symmetric_sqrt(self.Mb)
        np.testing.assert_allclose(root @ root, self.Mb, atol=1e-13)
        np.testing.assert_allclose(root, root.T)

    def test_sqrt_rejects_indefinite(self):
        """Test that an indefinite matrix has no square root."""
        with pytest.raises(ValueError):
            symmetric_sqrt(np.diag([1.0, -1.0]))


class TestForwardModel:
    """Tests for the assembled forward operator."""

    def setup_method(self):
        """Set up test fixtures."""
        self.model = assemble_forward(16, 1.0)

    def test_shape(self):
        """Test that A is m x n."""
        assert self.model.A.shape == (64, 289)
        assert self.model.m == 64
        assert self.model.n == 289

    def test_constant_source(self):
        """Test that a constant source gives the constant solution 1/ε."""
        x = np.ones(self.model.n)
        np.testing.assert_allclose(self.model.solve_field(x), 1.0, rtol=1e-10)
        np.testing.assert_allclose(
            self.model.A @ x,
            self.model.boundary_mass_sqrt @ np.ones(self.model.m),
            rtol=1e-10,
        )

    def test_constant_source_helmholtz(self):
        """Test the constant solution for ε = -1."""
        model = assemble_forward(8, -1.0)
        np.testing.assert_allclose(model.solve_field(np.ones(model.n)), -1.0, rtol=1e-10)

    def test_apply_matches_trace_path(self):
        """Test that the stored A agrees with solving and tracing."""
        rng = np.random.default_rng(3)
        x = rng.standard_normal(self.model.n)
        trace = self.model.boundary_mass_sqrt @ self.model.boundary_trace(x)
        np.testing.assert_allclose(apply_forward(self.model, x), trace, atol=1e-12)

    def test_data_only_model(self):
        """Test that a model without A still applies the forward map."""
        model = assemble_forward(16, 1.0, compute_operator=False)
        assert model.A is None
        x = np.zeros(model.n)
        x[144] = 1.0
        np.testing.assert_allclose(apply_forward(model, x), self.model.A[:, 144], atol=1e-12)

    def test_rank_bounded_by_m(self):
        """Test that rank(A) ≤ m < n, so A is not injective."""
        rank = np.linalg.matrix_rank(self.model.A)
        assert rank <= self.model.m < self.model.n

    def test_columns_nonzero(self):
        """Test that every source is seen on the boundary."""
        norms = np.linalg.norm(self.model.A, axis=0)
        assert norms.min() > 0

    def test_wrong_length(self):
        """Test that a vector of the wrong length is rejected."""
        with pytest.raises(DimensionMismatch):
            apply_forward(self.model, np.ones(10))

    def test_neumann_is_singular(self):
        """Test that ε = 0 is rejected."""
        with pytest.raises(SingularOperator):
            assemble_forward(8, 0.0)


class TestTraceTransfer:
    """Tests for fine-to-coarse boundary transfer."""

    def test_picks_coinciding_nodes(self):
        """Test that coarse boundary node k takes fine value k·ratio."""
        fine = build_grid(8)
        coarse = build_grid(4)
        trace = np.arange(32, dtype=float)
        np.testing.assert_array_equal(
            transfer_boundary_trace(fine, coarse, trace), np.arange(0, 32, 2)
        )

    def test_positions_coincide(self):
        """Test that the sampled fine nodes are the coarse boundary nodes."""
        fine = build_grid(12)
        coarse = build_grid(4)
        fine_pos = fine.node_coordinates[fine.boundary_index_map]
        picked = transfer_boundary_trace(fine, coarse, fine_pos[:, 0])
        np.testing.assert_allclose(picked, coarse.node_coordinates[coarse.boundary_index_map][:, 0])

    def test_same_grid_is_identity(self):
        """Test that transfer onto the same grid copies the trace."""
        grid = build_grid(4)
        trace = np.linspace(0, 1, 16)
        np.testing.assert_array_equal(transfer_boundary_trace(grid, grid, trace), trace)

    def test_incompatible(self):
        """Test that a non-refining pair of grids is rejected."""
        with pytest.raises(IncompatibleGrids):
            transfer_boundary_trace(build_grid(6), build_grid(4), np.zeros(24))

    def test_constant_source_transfers_exactly(self):
        """Test that the constant solution survives the transfer."""
        fine = assemble_forward(32, 1.0, compute_operator=False)
        coarse = build_grid(16)
        trace = fine.boundary_trace(np.ones(fine.n))
        np.testing.assert_allclose(transfer_boundary_trace(fine.grid, coarse, trace), 1.0, rtol=1e-10)
