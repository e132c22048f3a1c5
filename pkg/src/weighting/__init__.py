"""
Weighting operators.

Constructs the auxiliary operator B, the composite operator C = BA and the
diagonal weight matrix W with w_i = ‖C e_i‖₂.
"""

from .schemes import (
    WeightingScheme,
    Identity,
    TruncatedPseudoInverse,
    RandomSparse,
    PreOrthogonalizer,
    RankDeficient,
    DependentColumns,
    truncated_pseudoinverse,
    random_sparse_b,
    pre_orthogonalizer,
)
from .operators import WeightedOperator, ZeroColumn, build_weighted_operator, check_nonparallel

__all__ = [
    'WeightingScheme',
    'Identity',
    'TruncatedPseudoInverse',
    'RandomSparse',
    'PreOrthogonalizer',
    'RankDeficient',
    'DependentColumns',
    'truncated_pseudoinverse',
    'random_sparse_b',
    'pre_orthogonalizer',
    'WeightedOperator',
    'ZeroColumn',
    'build_weighted_operator',
    'check_nonparallel',
]
