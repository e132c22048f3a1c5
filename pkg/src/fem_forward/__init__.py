"""
Finite element forward model.

Builds the uniform P1 grid of the unit square, assembles the forward
operator A = M_∂^{1/2} L⁻¹ M and transfers boundary traces between grids.

Main entry point:
    from fem_forward import assemble_forward
    model = assemble_forward(16, epsilon=1.0)
"""

from .grid import Grid, build_grid, locate_node, grid_distance_cells
from .assembly import (
    ForwardModel,
    SingularOperator,
    assemble_forward,
    assemble_matrices,
    apply_forward,
    symmetric_sqrt,
)
from .trace_transfer import IncompatibleGrids, transfer_boundary_trace

__all__ = [
    'Grid',
    'build_grid',
    'locate_node',
    'grid_distance_cells',
    'ForwardModel',
    'SingularOperator',
    'assemble_forward',
    'assemble_matrices',
    'apply_forward',
    'symmetric_sqrt',
    'IncompatibleGrids',
    'transfer_boundary_trace',
]
