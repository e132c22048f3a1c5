"""
Normalized Gram analysis for almost parallel source images.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from weighting import WeightedOperator
from .q_lemma import perturbation_error_bound, r_perturbation_bound


def normalized_gram(op: WeightedOperator, J: Sequence[int]) -> np.ndarray:
    """G with g_ij = ⟨Ce_i/‖Ce_i‖, Ce_j/‖Ce_j‖⟩ for i, j in J."""
    G = op.normalized_inner_products(J, J)
    return 0.5 * (G + G.T)


@dataclass
class GramAnalysis:
    """
    Normalized Gram data of a support J and the verdicts derived from it.

    Attributes:
        J: The support
        G: Normalized Gram matrix on J
        rho_bar: Representative off-diagonal level ρ̄
        R: G − Q(ρ̄), zero on the diagonal
        r_inf_norm: ‖R‖∞ (largest absolute row sum)
        bound: Admissible ‖R‖∞ for ρ̄, None when ρ̄ is outside (0, 1)
        rho_in_domain: Whether 0 < ρ̄ < 1
        bound_satisfied: ‖R‖∞ <= bound
        min_offdiag: Smallest off-diagonal entry of G
        max_outside: Largest |g_ij| with i outside J and j in J
        most_parallel_satisfied: min_offdiag > max_outside
        error_bound: Relative error bound r/(1 − r), None outside the domain
    """
    J: List[int]
    G: np.ndarray
    rho_bar: float
    R: np.ndarray
    r_inf_norm: float
    bound: Optional[float]
    rho_in_domain: bool
    bound_satisfied: bool
    min_offdiag: float
    max_outside: float
    most_parallel_satisfied: bool
    error_bound: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            'J': self.J,
            'G': self.G.tolist(),
            'rho_bar': self.rho_bar,
            'r_inf_norm': self.r_inf_norm,
            'bound': self.bound,
            'rho_in_domain': self.rho_in_domain,
            'bound_satisfied': self.bound_satisfied,
            'min_offdiag': self.min_offdiag,
            'max_outside': self.max_outside,
            'most_parallel_satisfied': self.most_parallel_satisfied,
            'error_bound': self.error_bound,
        }


def analyze_parallel_recovery(op: WeightedOperator, J: Sequence[int],
                              rho_bar: Optional[float] = None) -> GramAnalysis:
    """
    Check the almost-parallel recovery conditions on a support J.

    ρ̄ defaults to the mean off-diagonal entry of G, which minimizes the sum
    of squared entries of R(ρ̄). Verdicts are carried in the report; nothing
    is raised when a condition fails.

    Args:
        op: Weighted operator
        J: Support with at least two indices
        rho_bar: Off-diagonal level of the comparison matrix Q(ρ̄)

    Returns:
        GramAnalysis
    """
    J = [int(j) for j in J]
    s = len(J)
    if s < 2:
        raise ValueError(f"Need at least two indices, got {J}")

    G = normalized_gram(op, J)
    off_diagonal = ~np.eye(s, dtype=bool)
    if rho_bar is None:
        rho_bar = float(G[off_diagonal].mean())

    R = np.where(off_diagonal, G - rho_bar, 0.0)
    r_inf_norm = float(np.abs(R).sum(axis=1).max())

    rho_in_domain = 0.0 < rho_bar < 1.0
    bound = None
    error_bound = None
    if rho_in_domain:
        bound = r_perturbation_bound(rho_bar, s)
        error_bound = perturbation_error_bound(rho_bar, s, r_inf_norm)
    bound_satisfied = bound is not None and r_inf_norm <= bound

    members = set(J)
    outside = [i for i in range(op.n) if i not in members]
    max_outside = 0.0
    if outside:
        max_outside = float(np.abs(op.normalized_inner_products(outside, J)).max())
    min_offdiag = float(G[off_diagonal].min())

    return GramAnalysis(
        J=J,
        G=G,
        rho_bar=float(rho_bar),
        R=R,
        r_inf_norm=r_inf_norm,
        bound=bound,
        rho_in_domain=rho_in_domain,
        bound_satisfied=bool(bound_satisfied),
        min_offdiag=min_offdiag,
        max_outside=max_outside,
        most_parallel_satisfied=min_offdiag > max_outside,
        error_bound=error_bound,
    )
