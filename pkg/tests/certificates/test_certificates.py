"""
Tests for backprojection, Gram analysis, dual certificates and disjointness.
"""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / 'src'))

from models import SourceConfiguration
from fem_forward import assemble_forward
from weighting import Identity, RandomSparse, build_weighted_operator
from solver import SolverConfig, solve_basis_pursuit
from certificates import (
    AssumptionViolated,
    NotOrthogonal,
    OverlapReport,
    SingularGram,
    analyze_parallel_recovery,
    argmax_source,
    check_disjoint_supports,
    disjointness_overlap,
    dual_certificate,
    dual_certificate_disjoint,
    mutual_coherence,
    normalized_gram,
    overlap_count,
    q_matrix,
    rows_disjoint,
    supports_disjoint,
    threshold_support,
    weighted_backprojection,
)


def q_fixture_operator():
    """4 x 4 C whose first three columns have normalized Gram Q(0.5)."""
    C = np.zeros((4, 4))
    C[:3, :3] = np.linalg.cholesky(q_matrix(0.5, 3)).T
    C[3, 3] = 1.0
    return build_weighted_operator(C, Identity())


@pytest.fixture(scope='module')
def model16():
    return assemble_forward(16, 1.0)


class TestBackprojection:
    """Tests for the argmax lemma and coherence."""

    def setup_method(self):
        """Set up test fixtures."""
        rng = np.random.default_rng(0)
        self.op = build_weighted_operator(rng.standard_normal((8, 20)), Identity())

    def test_peak_value(self):
        """Test that component j of W⁻¹CᵀCe_j equals ‖Ce_j‖."""
        back = weighted_backprojection(self.op, 4)
        assert back[4] == pytest.approx(self.op.column_norms[4])

    def test_argmax_at_source(self):
        """Test that every backprojection peaks at its own index."""
        for j in range(20):
            assert argmax_source(self.op, j) == j

    def test_tie_raises(self):
        """Test that duplicated columns produce a tie."""
        A = self.op.A.copy()
        A[:, 5] = A[:, 2]
        op = build_weighted_operator(A, Identity())
        with pytest.raises(AssumptionViolated):
            argmax_source(op, 2)

    def test_coherence(self):
        """Test coherence of orthonormal and of hand-built columns."""
        assert mutual_coherence(build_weighted_operator(np.eye(3), Identity())) == pytest.approx(0.0)
        C = np.array([[1.0, 0.0, 0.6],
                      [0.0, 1.0, 0.8]])
        assert mutual_coherence(build_weighted_operator(C, Identity())) == pytest.approx(0.8)

    def test_argmax_on_forward_operator(self, model16):
        """Test the argmax lemma on the 16 x 16 operator with a random B."""
        op = build_weighted_operator(model16.A, RandomSparse(p=64, density=0.1, seed=0))
        for j in (0, 40, 144, 200, 288):
            assert argmax_source(op, j) == j
        assert mutual_coherence(op) < 1.0


class TestGramAnalysis:
    """Tests for the almost-parallel analysis."""

    def test_q_fixture(self):
        """Test that the fixture reproduces Q(0.5) with no perturbation."""
        op = q_fixture_operator()
        analysis = analyze_parallel_recovery(op, [0, 1, 2])
        np.testing.assert_allclose(analysis.G, q_matrix(0.5, 3), atol=1e-12)
        assert analysis.rho_bar == pytest.approx(0.5)
        assert analysis.r_inf_norm == pytest.approx(0.0, abs=1e-12)
        assert analysis.bound == pytest.approx(0.2)
        assert analysis.bound_satisfied
        assert analysis.max_outside == pytest.approx(0.0, abs=1e-12)
        assert analysis.most_parallel_satisfied

    def test_rho_outside_domain(self):
        """Test that a negative mean correlation gives no bound."""
        C = np.array([[1.0, -1.0, 0.0],
                      [0.0, 0.1, 1.0]])
        analysis = analyze_parallel_recovery(build_weighted_operator(C, Identity()), [0, 1])
        assert not analysis.rho_in_domain
        assert analysis.bound is None
        assert not analysis.bound_satisfied

    def test_needs_two_indices(self):
        """Test that a single index is rejected."""
        with pytest.raises(ValueError):
            analyze_parallel_recovery(q_fixture_operator(), [0])

    def test_gram_symmetric(self, model16):
        """Test that the normalized Gram matrix is symmetric with unit diagonal."""
        op = build_weighted_operator(model16.A, Identity())
        G = normalized_gram(op, [10, 144, 150])
        np.testing.assert_array_equal(G, G.T)
        np.testing.assert_allclose(np.diag(G), 1.0, rtol=1e-12)


class TestDualCertificate:
    """Tests for both certificate constructions."""

    def test_q_fixture_certificate(self):
        """Test that Gz = 1 gives z = 0.5 and a valid certificate."""
        op = q_fixture_operator()
        x_star = SourceConfiguration.from_pairs([(0, 1.0), (1, 1.0), (2, 1.0)], n=4)
        report = dual_certificate(op, x_star)
        np.testing.assert_allclose(report.z, 0.5, atol=1e-10)
        assert report.valid
        assert report.z_nonnegative
        assert report.cond2_margin == pytest.approx(1.0)
        assert report.construction == 'gram_system'

    def test_negative_sources(self):
        """Test that all-negative amplitudes flip c."""
        op = q_fixture_operator()
        x_star = SourceConfiguration.from_pairs([(0, -2.0), (1, -1.0)], n=4)
        report = dual_certificate(op, x_star)
        assert report.valid
        assert report.signs == [-1.0, -1.0]

    def test_mixed_signs_rejected(self):
        """Test that the Gram construction needs same-sign sources."""
        op = q_fixture_operator()
        with pytest.raises(AssumptionViolated):
            dual_certificate(op, SourceConfiguration.from_pairs([(0, 1.0), (1, -1.0)], n=4))

    def test_singular_gram(self):
        """Test that parallel images give a singular Gram matrix."""
        C = np.array([[1.0, 2.0, 0.0],
                      [1.0, 2.0, 1.0]])
        op = build_weighted_operator(C, Identity())
        with pytest.raises(SingularGram):
            dual_certificate(op, SourceConfiguration.from_pairs([(0, 1.0), (1, 1.0)], n=3))

    def test_disjoint_construction(self):
        """Test the sign-sum certificate for orthogonal images."""
        C = np.array([[1.0, 0.0, 0.0, 0.6],
                      [0.0, 1.0, 0.0, 0.8],
                      [0.0, 0.0, 1.0, 0.0]])
        op = build_weighted_operator(C, Identity())
        report = dual_certificate_disjoint(op, SourceConfiguration.from_pairs([(0, 1.0), (1, -1.0)], n=4))
        assert report.valid
        assert report.cond1_residual == pytest.approx(0.0, abs=1e-14)
        assert report.cond2_margin == pytest.approx(0.8)
        assert report.construction == 'disjoint'

    def test_disjoint_needs_orthogonality(self):
        """Test that non-orthogonal images are rejected."""
        op = q_fixture_operator()
        with pytest.raises(NotOrthogonal):
            dual_certificate_disjoint(op, SourceConfiguration.from_pairs([(0, 1.0), (1, 1.0)], n=4))

    def test_to_dict(self):
        """Test that the report serializes without the dual vector."""
        op = q_fixture_operator()
        report = dual_certificate(op, SourceConfiguration.from_pairs([(0, 1.0), (1, 1.0)], n=4))
        data = report.to_dict()
        assert data['J'] == [0, 1]
        assert 'c' not in data


class TestDisjointness:
    """Tests for the thresholded overlap diagnostic."""

    def test_threshold_support(self):
        """Test that components at or below τ·peak are dropped."""
        v = np.array([1.0, -0.5, 0.2, 0.0])
        np.testing.assert_array_equal(threshold_support(v, 0.0), [True, True, True, False])
        np.testing.assert_array_equal(threshold_support(v, 0.5), [True, False, False, False])
        np.testing.assert_array_equal(threshold_support(np.zeros(3), 0.0), [False, False, False])

    def test_rounding_floor(self):
        """Test that rounding-level entries do not count at τ = 0."""
        np.testing.assert_array_equal(threshold_support(np.array([1.0, 1e-16]), 0.0), [True, False])

    def test_overlap_count(self):
        """Test ν for two hand-built vectors."""
        u = np.array([1.0, 0.9, 0.1, 0.0])
        v = np.array([0.0, 0.2, 0.3, 1.0])
        assert overlap_count(u, v, 0.0) == 2
        assert overlap_count(u, v, 0.25) == 0

    def test_supports_disjoint(self):
        """Test pairwise disjointness of several vectors."""
        assert supports_disjoint([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert not supports_disjoint([np.array([1.0, 1.0]), np.array([0.0, 1.0])])

    def test_orthogonal_columns(self):
        """Test that C = I has disjoint backprojections and rows."""
        op = build_weighted_operator(np.eye(4), Identity())
        assert check_disjoint_supports(op, [0, 1, 3])
        assert rows_disjoint(op)

    def test_rows_overlap(self):
        """Test that rows sharing a column are not disjoint."""
        C = np.array([[1.0, 1.0, 0.0],
                      [0.0, 1.0, 1.0]])
        op = build_weighted_operator(C, Identity())
        assert not rows_disjoint(op)
        assert rows_disjoint(op, rows=[0])

    def test_overlap_sweep_monotone(self, model16):
        """Test that ν is non-increasing in τ and vanishes at τ = 1."""
        op = build_weighted_operator(model16.A, Identity())
        taus = [i / 20 for i in range(21)]
        report = disjointness_overlap(op, 72, 216, taus)
        assert report.n == 289
        assert all(a >= b for a, b in zip(report.counts, report.counts[1:]))
        assert report.counts[-1] == 0
        assert report.vanishing_tau() is not None
        assert report.ratios[0] == report.counts[0] / 289

    def test_overlap_invalid(self, model16):
        """Test that j = k and τ outside [0, 1] are rejected."""
        op = build_weighted_operator(model16.A, Identity())
        with pytest.raises(ValueError):
            disjointness_overlap(op, 3, 3, [0.0])
        with pytest.raises(ValueError):
            disjointness_overlap(op, 3, 4, [1.5])

    def test_vanishing_tau_none(self):
        """Test that a ratio that never vanishes has no vanishing τ."""
        report = OverlapReport(pair=(0, 1), tau_values=[0.0, 0.5], counts=[3, 1], ratios=[0.3, 0.1], n=10)
        assert report.vanishing_tau() is None
        assert report.to_dict()['vanishing_tau'] is None


def almost_parallel_operator():
    """
    8 x 12 C whose first three columns have cosines 0.61, 0.59 and 0.6.

    The other nine columns are random unit vectors that reach into the span
    of the first three only with a tenth of their length.
    """
    G = np.array([[1.0, 0.61, 0.59],
                  [0.61, 1.0, 0.60],
                  [0.59, 0.60, 1.0]])
    C = np.zeros((8, 12))
    C[:3, :3] = np.linalg.cholesky(G).T
    rng = np.random.default_rng(7)
    for i in range(3, 12):
        v = np.concatenate([0.1 * rng.standard_normal(3), rng.standard_normal(5)])
        C[:, i] = v / np.linalg.norm(v)
    return build_weighted_operator(C, Identity())


class TestAlmostParallelRecovery:
    """Tests tying the Gram and certificate checks to basis pursuit recovery."""

    def setup_method(self):
        """Set up test fixtures."""
        self.op = almost_parallel_operator()
        self.J = [0, 1, 2]

    def test_bound_satisfied(self):
        """Test that cosines 0.6 ± 0.01 stay within the perturbation bound of Q(0.6)."""
        analysis = analyze_parallel_recovery(self.op, self.J)
        assert analysis.rho_bar == pytest.approx(0.6)
        assert analysis.r_inf_norm == pytest.approx(0.02)
        assert analysis.bound_satisfied

    def test_basis_pursuit_recovers_sum(self):
        """Test that e_0 + e_1 + e_2 is the basis pursuit solution."""
        target = np.zeros(12)
        target[self.J] = 1.0
        result = solve_basis_pursuit(self.op, self.op.matvec(target), SolverConfig())
        assert result.support == self.J
        np.testing.assert_allclose(result.x, target, atol=1e-6)

    @pytest.mark.parametrize('amplitudes', [(1.0, 1.0, 1.0), (0.5, 2.0, 1.0), (-1.0, -0.3, -2.0)])
    def test_valid_certificate_confines_support(self, amplitudes):
        """Test that a valid certificate with z >= 0 keeps the basis pursuit support inside J."""
        truth = SourceConfiguration.from_pairs(list(zip(self.J, amplitudes)), n=12)
        report = dual_certificate(self.op, truth)
        assert report.valid
        assert report.z_nonnegative

        result = solve_basis_pursuit(self.op, self.op.matvec(truth.to_vector()), SolverConfig())
        assert set(result.support) <= set(self.J)
        np.testing.assert_allclose(result.x, truth.to_vector(), atol=1e-6)
