"""
Calibrated Gaussian noise.
"""

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError
from .config import NoiseSpec


class ZeroData(WeightedSparsityError):
    """Raised when relative noise is requested for a zero observation."""
    pass


def draw_noise(length: int, seed: int) -> np.ndarray:
    """Standard normal vector from a Philox stream seeded with seed."""
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.standard_normal(length)


def add_noise(y: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """
    Add Gaussian noise rescaled so that ‖η‖₂/‖y‖₂ equals spec.level.

    Raises:
        ZeroData: If y = 0 and spec.level > 0
    """
    y = np.asarray(y, dtype=float)
    if spec.level == 0:
        return y.copy()

    norm_y = np.linalg.norm(y)
    if norm_y == 0.0:
        raise ZeroData("Cannot add relative noise to a zero observation")

    eta = draw_noise(y.shape[0], spec.seed)
    eta *= spec.level * norm_y / np.linalg.norm(eta)
    return y + eta
