"""
Post-solve diagnostics: recovered clusters, localization errors and the
certificate analyses requested by a scenario.
"""

import logging
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy import ndimage

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import SourceConfiguration, WeightedSparsityError
from fem_forward import Grid, grid_distance_cells
from weighting import WeightedOperator, check_nonparallel
from certificates import (
    analyze_parallel_recovery,
    disjointness_overlap,
    dual_certificate,
    dual_certificate_disjoint,
    mutual_coherence,
)
from .config import Analyses

logger = logging.getLogger(__name__)

# 8-connectivity: diagonal neighbours belong to the same cluster
_CLUSTER_STRUCTURE = np.ones((3, 3), dtype=int)

# Support nodes below this fraction of max|x| are left out of the clusters
CLUSTER_FRACTION = 0.05


def recovered_clusters(x: np.ndarray, grid: Grid, support: Sequence[int],
                       fraction: float = CLUSTER_FRACTION) -> List[int]:
    """
    Group support nodes with |x_i| >= fraction·max|x| into 8-connected clusters.

    Returns:
        The node of largest |x| in each cluster, in label order
    """
    side = grid.cells_per_side + 1
    magnitude = np.abs(np.asarray(x, dtype=float))
    support = list(support)
    mask = np.zeros(grid.node_count, dtype=bool)
    if support:
        peak = magnitude[support].max()
        mask[[i for i in support if magnitude[i] >= fraction * peak]] = True
    labels, count = ndimage.label(mask.reshape(side, side), structure=_CLUSTER_STRUCTURE)
    labels = labels.ravel()

    peaks = []
    for label in range(1, count + 1):
        members = np.flatnonzero(labels == label)
        peaks.append(int(members[np.argmax(magnitude[members])]))
    return peaks


def localization_errors(truth: SourceConfiguration, support: Sequence[int], grid: Grid) -> List[Optional[int]]:
    """
    For each true source, the distance in cells to the nearest recovered node.

    None for every source when nothing was recovered.
    """
    support = list(support)
    if not support:
        return [None] * truth.s
    return [min(grid_distance_cells(grid, j, i) for i in support) for j in truth.support]


def run_analyses(op: WeightedOperator, truth: SourceConfiguration, analyses: Analyses) -> Dict[str, Any]:
    """
    Compute the requested diagnostics.

    Failures of a hypothesis (for instance mixed signs for the Gram-system
    certificate) are recorded in the report instead of aborting the run.
    """
    report: Dict[str, Any] = {}

    if analyses.coherence:
        report['mutual_coherence'] = mutual_coherence(op)
        report['parallel_pairs'] = [list(pair) for pair in check_nonparallel(op)]

    if analyses.certificates and truth.s > 0:
        certificates: Dict[str, Any] = {}
        if truth.s >= 2:
            certificates['gram'] = analyze_parallel_recovery(op, truth.support).to_dict()
        for label, build in (('gram_system', dual_certificate), ('disjoint', dual_certificate_disjoint)):
            try:
                certificates[label] = build(op, truth).to_dict()
            except WeightedSparsityError as e:
                logger.info("Certificate %s not available: %s", label, e)
                certificates[label] = {'error': str(e)}
        report['certificates'] = certificates

    if analyses.overlap and truth.s >= 2:
        report['overlap'] = [
            disjointness_overlap(op, j, k, analyses.overlap_taus)
            for j, k in combinations(truth.support, 2)
        ]

    return report
