"""
Tests for the auxiliary operators B and the weighted operator.
"""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / 'src'))

from models import DimensionMismatch
from fem_forward import assemble_forward, build_grid, locate_node
from weighting import (
    DependentColumns,
    Identity,
    PreOrthogonalizer,
    RandomSparse,
    RankDeficient,
    TruncatedPseudoInverse,
    ZeroColumn,
    build_weighted_operator,
    check_nonparallel,
    pre_orthogonalizer,
    random_sparse_b,
    truncated_pseudoinverse,
)


@pytest.fixture(scope='module')
def model16():
    return assemble_forward(16, 1.0)


class TestSchemes:
    """Tests for the B constructors."""

    def setup_method(self):
        """Set up test fixtures."""
        rng = np.random.default_rng(0)
        self.A = rng.standard_normal((6, 10))

    # --- Truncated Pseudoinverse Tests ---

    def test_full_rank_pinv_matches_numpy(self):
        """Test that keeping every singular value gives the pseudoinverse."""
        np.testing.assert_allclose(truncated_pseudoinverse(self.A, 6), np.linalg.pinv(self.A), atol=1e-12)

    def test_truncated_shape(self):
        """Test that A_k† is n x m with rank k."""
        B = truncated_pseudoinverse(self.A, 3)
        assert B.shape == (10, 6)
        assert np.linalg.matrix_rank(B) == 3

    def test_rank_deficient(self):
        """Test that truncating past the numerical rank raises."""
        A = np.outer([1.0, 2.0, 3.0], [1.0, 0.0, 1.0, 2.0])
        with pytest.raises(RankDeficient):
            truncated_pseudoinverse(A, 2)

    def test_k_out_of_range(self):
        """Test that k > min(m, n) is rejected."""
        with pytest.raises(ValueError):
            truncated_pseudoinverse(self.A, 7)
        with pytest.raises(ValueError):
            TruncatedPseudoInverse(k=0)

    # --- Random Sparse Tests ---

    def test_random_reproducible(self):
        """Test that a seed always yields the same matrix."""
        np.testing.assert_array_equal(random_sparse_b(5, 8, 0.3, 11), random_sparse_b(5, 8, 0.3, 11))
        assert not np.array_equal(random_sparse_b(5, 8, 0.3, 11), random_sparse_b(5, 8, 0.3, 12))

    def test_random_values_in_unit_interval(self):
        """Test that with density 1 the entries are Uniform(0, 1) draws."""
        B = random_sparse_b(100, 100, 1.0, 0)
        assert np.all(B >= 0.0)
        assert np.all(B < 1.0)
        assert abs(B.mean() - 0.5) < 0.01
        assert abs(np.mean(B < 0.25) - 0.25) < 0.02

    def test_random_density(self):
        """Test that roughly a tenth of the entries are kept."""
        B = random_sparse_b(200, 200, 0.1, 0)
        fraction = np.count_nonzero(B) / B.size
        assert 0.08 < fraction < 0.12

    def test_random_invalid(self):
        """Test that bad parameters are rejected."""
        with pytest.raises(ValueError):
            RandomSparse(p=4, density=0.0)
        with pytest.raises(ValueError):
            RandomSparse(p=0)

    # --- Pre-orthogonalizer Tests ---

    def test_pre_orth_maps_support_to_unit_vectors(self):
        """Test that Y†A e_{j_k} = ê_k."""
        J = (1, 4, 7)
        B = pre_orthogonalizer(self.A, J)
        images = B @ self.A[:, list(J)]
        np.testing.assert_allclose(images, np.eye(3), atol=1e-12)

    def test_pre_orth_dependent(self):
        """Test that parallel columns of A are rejected."""
        A = self.A.copy()
        A[:, 2] = 2.0 * A[:, 1]
        with pytest.raises(DependentColumns):
            pre_orthogonalizer(A, (1, 2))

    def test_pre_orth_invalid_indices(self):
        """Test that repeated or out of range indices are rejected."""
        with pytest.raises(ValueError):
            pre_orthogonalizer(self.A, (1, 1))
        with pytest.raises(ValueError):
            pre_orthogonalizer(self.A, (10,))
        with pytest.raises(ValueError):
            PreOrthogonalizer(indices=())


class TestWeightedOperator:
    """Tests for C = BA and W."""

    def setup_method(self):
        """Set up test fixtures."""
        rng = np.random.default_rng(1)
        self.A = rng.standard_normal((6, 10))

    def test_identity_weights(self):
        """Test that with B = I the weights are the column norms of A."""
        op = build_weighted_operator(self.A, Identity())
        np.testing.assert_allclose(op.weights, np.linalg.norm(self.A, axis=0))
        assert op.p == 6
        assert op.B is None

    def test_unit_normalized_columns(self):
        """Test that the columns of C W⁻¹ have unit norm."""
        op = build_weighted_operator(self.A, RandomSparse(p=6, density=1.0, seed=2))
        np.testing.assert_allclose(np.linalg.norm(op.normalized_columns(), axis=0), 1.0, rtol=1e-12)

    def test_unweighted(self):
        """Test that weighted=False keeps W = I but still records the norms."""
        op = build_weighted_operator(self.A, Identity(), weighted=False)
        np.testing.assert_array_equal(op.weights, np.ones(10))
        np.testing.assert_allclose(op.column_norms, np.linalg.norm(self.A, axis=0))

    def test_factored_products(self):
        """Test that a tall B gives the same products as the stored C."""
        op = build_weighted_operator(self.A, RandomSparse(p=12, density=0.5, seed=0))
        assert op.factored
        rng = np.random.default_rng(2)
        x = rng.standard_normal(10)
        r = rng.standard_normal(12)
        np.testing.assert_allclose(op.matvec(x), op.C @ x, atol=1e-12)
        np.testing.assert_allclose(op.rmatvec(r), op.C.T @ r, atol=1e-12)
        np.testing.assert_allclose(op.inner_products([0, 1], [2, 3]),
                                   op.C[:, [0, 1]].T @ op.C[:, [2, 3]], atol=1e-12)

    def test_normalized_inner_products_diagonal(self):
        """Test that every column has cosine 1 with itself."""
        op = build_weighted_operator(self.A, TruncatedPseudoInverse(k=6))
        cosines = op.normalized_inner_products(range(10), range(10))
        np.testing.assert_allclose(np.diag(cosines), 1.0, rtol=1e-12)

    def test_zero_column(self):
        """Test that a vanishing column of C is reported with its index."""
        A = self.A.copy()
        A[:, 3] = 0.0
        with pytest.raises(ZeroColumn) as excinfo:
            build_weighted_operator(A, Identity())
        assert excinfo.value.index == 3

    def test_data_vector(self):
        """Test that b = B y and that y must have length m."""
        op = build_weighted_operator(self.A, TruncatedPseudoInverse(k=4))
        y = np.arange(6, dtype=float)
        np.testing.assert_allclose(op.data_vector(y), op.B @ y)
        with pytest.raises(DimensionMismatch):
            op.data_vector(np.ones(5))

    # --- Non-parallel Column Tests ---

    def test_parallel_pair_detected(self):
        """Test that parallel and antiparallel columns are found."""
        C = np.array([[1.0, 2.0, 0.0, -1.0],
                      [0.0, 0.0, 1.0, 0.0]])
        assert check_nonparallel(C) == [(0, 1), (0, 3), (1, 3)]

    def test_no_parallel_pairs(self):
        """Test that generic columns are pairwise non-parallel."""
        assert check_nonparallel(self.A) == []


class TestForwardOperatorWeighting:
    """Weighting on the 16 x 16 forward operator."""

    @pytest.mark.parametrize('scheme', [
        Identity(),
        TruncatedPseudoInverse(k=32),
        RandomSparse(p=64, density=0.1, seed=0),
    ])
    def test_columns_nonparallel(self, model16, scheme):
        """Test that no two columns of C are parallel."""
        op = build_weighted_operator(model16.A, scheme)
        assert check_nonparallel(op) == []

    def test_pre_orth_on_asymmetric_support(self, model16):
        """Test the pre-orthogonalizer images on three nodes."""
        grid = build_grid(16)
        J = tuple(locate_node(grid, p) for p in ((0.1875, 0.3125), (0.5, 0.5625), (0.75, 0.625)))
        op = build_weighted_operator(model16.A, PreOrthogonalizer(indices=J))
        np.testing.assert_allclose(op.columns(J), np.eye(3), atol=1e-10)
