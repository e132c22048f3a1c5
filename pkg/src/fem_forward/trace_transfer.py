"""
Transfer of boundary traces from a fine grid to a coarser one.
"""

import sys
from pathlib import Path

import numpy as np

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError, as_vector
from .grid import Grid


class IncompatibleGrids(WeightedSparsityError):
    """Raised when the fine grid does not refine the coarse grid."""
    pass


def transfer_boundary_trace(fine: Grid, coarse: Grid, trace_fine: np.ndarray) -> np.ndarray:
    """
    Sample a fine-grid boundary trace at the coarse boundary nodes.

    Both boundary orderings start at (0, 0) and run counterclockwise, so
    coarse node k sits at arc length k/N_c, which is fine node k·(N_f/N_c).
    Piecewise-linear interpolation along the boundary therefore reduces to
    picking those fine values.

    Args:
        fine: Grid the trace was computed on
        coarse: Target grid
        trace_fine: Values at the 4N_f fine boundary nodes

    Returns:
        Values at the 4N_c coarse boundary nodes

    Raises:
        IncompatibleGrids: If N_f is not a multiple of N_c
        DimensionMismatch: If the trace length is not 4N_f
    """
    N_f = fine.cells_per_side
    N_c = coarse.cells_per_side
    if N_f % N_c != 0:
        raise IncompatibleGrids(f"Fine grid N={N_f} is not a multiple of coarse grid N={N_c}")

    trace_fine = as_vector(trace_fine, fine.boundary_node_count, name="trace_fine")
    ratio = N_f // N_c
    return trace_fine[np.arange(coarse.boundary_node_count) * ratio].copy()
