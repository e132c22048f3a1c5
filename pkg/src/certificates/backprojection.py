"""
Weighted backprojection, the argmax lemma and mutual coherence.
"""

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError
from weighting import WeightedOperator

TIE_TOLERANCE = 1e-12
GRAM_BLOCK_SIZE = 512


class AssumptionViolated(WeightedSparsityError):
    """Raised when a hypothesis of a recovery result fails numerically."""
    pass


def weighted_backprojection(op: WeightedOperator, j: int) -> np.ndarray:
    """
    Compute W⁻¹CᵀC e_j.

    Component i equals ‖Ce_j‖·⟨Ce_j/‖Ce_j‖, Ce_i/‖Ce_i‖⟩ for the weighted
    operator, so by Cauchy-Schwarz its largest magnitude sits at i = j.
    """
    return op.rmatvec(op.column(j)) / op.weights


def argmax_source(op: WeightedOperator, j: int) -> int:
    """
    Index of the largest |component| of the weighted backprojection of e_j.

    Raises:
        AssumptionViolated: If the two largest magnitudes agree to 1e-12
            relative, which means two columns of C are parallel at working
            precision
    """
    magnitude = np.abs(weighted_backprojection(op, j))
    winner = int(np.argmax(magnitude))
    if magnitude.size > 1:
        runner_up = np.max(np.delete(magnitude, winner))
        if magnitude[winner] - runner_up <= TIE_TOLERANCE * magnitude[winner]:
            raise AssumptionViolated(
                f"Backprojection of e_{j} has a tie at its maximum {magnitude[winner]:.6e}"
            )
    return winner


def mutual_coherence(op: WeightedOperator) -> float:
    """Largest |cos angle| between two distinct columns of C."""
    n = op.n
    coherence = 0.0
    for start in range(0, n, GRAM_BLOCK_SIZE):
        rows = range(start, min(start + GRAM_BLOCK_SIZE, n))
        for col_start in range(start, n, GRAM_BLOCK_SIZE):
            cols = range(col_start, min(col_start + GRAM_BLOCK_SIZE, n))
            cosines = np.abs(op.normalized_inner_products(rows, cols))
            if col_start == start:
                np.fill_diagonal(cosines, 0.0)
            coherence = max(coherence, float(cosines.max()))
    return coherence
