"""
Solvers for the weighted ℓ¹ problem and its basis pursuit limit.
"""

from .proximal import objective, operator_norm_sq, weighted_soft_threshold, kkt_residual
from .active_set import lasso_path, refine_on_working_set
from .lasso import (
    SolverConfig,
    SolveResult,
    NotConverged,
    AlphaTooLarge,
    solve_weighted_lasso,
    solve_basis_pursuit,
    closed_form_single_source,
    uniqueness_probe,
    support_of,
)

__all__ = [
    'objective',
    'operator_norm_sq',
    'weighted_soft_threshold',
    'kkt_residual',
    'SolverConfig',
    'SolveResult',
    'NotConverged',
    'AlphaTooLarge',
    'solve_weighted_lasso',
    'solve_basis_pursuit',
    'closed_form_single_source',
    'uniqueness_probe',
    'support_of',
    'lasso_path',
    'refine_on_working_set',
]
