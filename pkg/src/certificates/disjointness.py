"""
Disjoint-support checks and the thresholded overlap diagnostic.

u_j is CᵀCe_j with every component at or below τ·‖CᵀCe_j‖∞ set to zero.
At τ = 0 components below 1e-14·‖CᵀCe_j‖∞ also count as zero, since exact
zeros do not survive rounding.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from weighting import WeightedOperator

ROUNDING_FLOOR = 1e-14


def _check_tau(tau: float) -> None:
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")


def threshold_support(v: np.ndarray, tau: float) -> np.ndarray:
    """Boolean mask of the components of v that survive thresholding at τ."""
    _check_tau(tau)
    magnitude = np.abs(np.asarray(v, dtype=float))
    peak = magnitude.max() if magnitude.size else 0.0
    if peak == 0.0:
        return np.zeros(magnitude.shape, dtype=bool)
    return magnitude > max(tau, ROUNDING_FLOOR) * peak


def overlap_count(u: np.ndarray, v: np.ndarray, tau: float) -> int:
    """ν: number of indices where both thresholded vectors are nonzero."""
    return int(np.count_nonzero(threshold_support(u, tau) & threshold_support(v, tau)))


def supports_disjoint(vectors: Sequence[np.ndarray], tau: float = 0.0) -> bool:
    """True iff the thresholded vectors have pairwise disjoint supports."""
    masks = [threshold_support(v, tau) for v in vectors]
    for a in range(len(masks)):
        for b in range(a + 1, len(masks)):
            if np.any(masks[a] & masks[b]):
                return False
    return True


def backprojection_images(op: WeightedOperator, J: Sequence[int]) -> List[np.ndarray]:
    """CᵀCe_j for each j in J."""
    return [op.rmatvec(op.column(int(j))) for j in J]


def check_disjoint_supports(op: WeightedOperator, J: Sequence[int], tau: float = 0.0) -> bool:
    """Whether supp(u_j) ∩ supp(u_k) = ∅ for all distinct j, k in J."""
    _check_tau(tau)
    return supports_disjoint(backprojection_images(op, J), tau)


def rows_disjoint(op: WeightedOperator, rows: Optional[Sequence[int]] = None, tau: float = 0.0) -> bool:
    """
    Whether the selected rows of C have pairwise disjoint supports.

    With C = Y†A the disjoint-support condition on J reduces to this check.
    """
    C = op.C
    selected = range(C.shape[0]) if rows is None else rows
    return supports_disjoint([C[r] for r in selected], tau)


@dataclass
class OverlapReport:
    """
    Overlap ratio ν/n of two thresholded backprojections over a τ sweep.

    Attributes:
        pair: The source indices (j, k)
        tau_values: Thresholds τ, in the order given
        counts: ν for each τ
        ratios: ν/n for each τ
        n: Length of the vectors
        scheme: Name of the weighting scheme of the operator
    """
    pair: Tuple[int, int]
    tau_values: List[float]
    counts: List[int]
    ratios: List[float]
    n: int
    scheme: str = ''

    def vanishing_tau(self) -> Optional[float]:
        """Smallest τ at which the ratio is zero (None if it never is)."""
        zero = [tau for tau, ratio in zip(self.tau_values, self.ratios) if ratio == 0.0]
        return min(zero) if zero else None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            'pair': list(self.pair),
            'tau_values': self.tau_values,
            'counts': self.counts,
            'ratios': self.ratios,
            'n': self.n,
            'scheme': self.scheme,
            'vanishing_tau': self.vanishing_tau(),
        }


def disjointness_overlap(op: WeightedOperator, j: int, k: int, taus: Sequence[float]) -> OverlapReport:
    """
    Sweep τ and measure how much u_j and u_k overlap.

    n is the full coefficient dimension; when either thresholded vector is
    empty ν is 0.
    """
    if j == k:
        raise ValueError(f"Need two distinct indices, got j=k={j}")
    taus = [float(t) for t in taus]
    for tau in taus:
        _check_tau(tau)

    u_j, u_k = backprojection_images(op, [j, k])
    counts = [overlap_count(u_j, u_k, tau) for tau in taus]
    return OverlapReport(
        pair=(int(j), int(k)),
        tau_values=taus,
        counts=counts,
        ratios=[count / op.n for count in counts],
        n=op.n,
        scheme=op.scheme.name,
    )
