"""
Synthetic observations.

Data are generated on the forward grid, whose boundary trace is sampled at
the inversion grid's boundary nodes before the coarse M_∂^{1/2} is applied.
Noise is added last.
"""

import logging
from collections import defaultdict
from typing import Optional, Tuple

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import SourceConfiguration
from fem_forward import (
    ForwardModel,
    Grid,
    apply_forward,
    assemble_forward,
    locate_node,
    transfer_boundary_trace,
)
from .config import ScenarioConfig
from .noise import add_noise

logger = logging.getLogger(__name__)


def place_sources(cfg: ScenarioConfig, grid: Grid, scale: float = 1.0) -> SourceConfiguration:
    """
    Snap every configured source to its nearest node of grid.

    Sources landing on the same node are added up; zero totals are dropped.
    """
    amplitudes = defaultdict(float)
    for source in cfg.sources:
        amplitudes[locate_node(grid, source.location)] += scale * source.amplitude
    pairs = [(j, a) for j, a in amplitudes.items() if a != 0.0]
    return SourceConfiguration.from_pairs(pairs, n=grid.node_count)


def synthesize_observation(cfg: ScenarioConfig,
                           coarse: Optional[ForwardModel] = None) -> Tuple[np.ndarray, SourceConfiguration]:
    """
    Generate the observation y on the inversion grid.

    On the forward grid each source carries amplitude·(N_f/N_c)², which keeps
    its integral equal to that of a coarse nodal basis function.

    Args:
        cfg: Scenario
        coarse: Forward model on the inversion grid, assembled if omitted

    Returns:
        (y, truth): the noisy observation of length 4·inverse_N and the
        sources snapped to the inversion grid
    """
    if coarse is None:
        coarse = assemble_forward(cfg.inverse_N, cfg.epsilon)
    truth = place_sources(cfg, coarse.grid)

    if cfg.inverse_crime:
        y = apply_forward(coarse, truth.to_vector())
    else:
        fine = assemble_forward(cfg.forward_N, cfg.epsilon, compute_operator=False)
        ratio = cfg.forward_N / cfg.inverse_N
        fine_truth = place_sources(cfg, fine.grid, scale=ratio ** 2)
        trace = fine.boundary_trace(fine_truth.to_vector())
        y = coarse.boundary_mass_sqrt @ transfer_boundary_trace(fine.grid, coarse.grid, trace)

    logger.debug("Observation synthesized: sources=%d norm=%.3e noise=%g",
                 truth.s, np.linalg.norm(y), cfg.noise.level)
    return add_noise(y, cfg.noise), truth
