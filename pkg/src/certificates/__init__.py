"""
Recoverability diagnostics.

Weighted backprojection and the argmax lemma, mutual coherence, the Q(ρ)
closed forms, normalized Gram analysis, dual certificates and the
disjoint-support checks.
"""

from .backprojection import AssumptionViolated, weighted_backprojection, argmax_source, mutual_coherence
from .q_lemma import (
    DomainError,
    q_matrix,
    q_closed_form_solution,
    q_inverse_entries,
    q_inverse_inf_norm,
    r_perturbation_bound,
    perturbation_error_bound,
)
from .gram import GramAnalysis, normalized_gram, analyze_parallel_recovery
from .dual import (
    CertificateReport,
    SingularGram,
    NotOrthogonal,
    dual_certificate,
    dual_certificate_disjoint,
)
from .disjointness import (
    OverlapReport,
    threshold_support,
    overlap_count,
    supports_disjoint,
    check_disjoint_supports,
    rows_disjoint,
    disjointness_overlap,
)

__all__ = [
    'AssumptionViolated',
    'weighted_backprojection',
    'argmax_source',
    'mutual_coherence',
    'DomainError',
    'q_matrix',
    'q_closed_form_solution',
    'q_inverse_entries',
    'q_inverse_inf_norm',
    'r_perturbation_bound',
    'perturbation_error_bound',
    'GramAnalysis',
    'normalized_gram',
    'analyze_parallel_recovery',
    'CertificateReport',
    'SingularGram',
    'NotOrthogonal',
    'dual_certificate',
    'dual_certificate_disjoint',
    'OverlapReport',
    'threshold_support',
    'overlap_count',
    'supports_disjoint',
    'check_disjoint_supports',
    'rows_disjoint',
    'disjointness_overlap',
]
