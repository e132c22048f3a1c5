"""
Building blocks of the proximal gradient solvers.

objective, kkt_residual and weighted_soft_threshold work on any
WeightedOperator; operator_norm_sq also accepts a plain matrix.
"""

import logging
from typing import Union

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import as_vector
from weighting import WeightedOperator

logger = logging.getLogger(__name__)

POWER_ITERATION_TOLERANCE = 1e-9
POWER_ITERATION_MAX_STEPS = 10000


def objective(op: WeightedOperator, b: np.ndarray, alpha: float, x: np.ndarray) -> float:
    """
    Evaluate ½‖Cx − b‖₂² + α Σ w_i |x_i|.

    Raises:
        DimensionMismatch: If x or b have the wrong length
    """
    x = as_vector(x, op.n)
    b = as_vector(b, op.p, name="b")
    residual = op.matvec(x) - b
    return 0.5 * float(residual @ residual) + alpha * float(np.sum(op.weights * np.abs(x)))


def weighted_soft_threshold(v: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Componentwise sign(v_i)·max(|v_i| − θ_i, 0)."""
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - thresholds, 0.0)


def kkt_residual(op: WeightedOperator, b: np.ndarray, alpha: float, x: np.ndarray) -> float:
    """
    Largest violation of the optimality conditions of the weighted lasso.

    With g = Cᵀ(Cx − b) the violation is |g_i + α w_i sign(x_i)| where
    x_i ≠ 0 and max(|g_i| − α w_i, 0) where x_i = 0.
    """
    x = as_vector(x, op.n)
    b = as_vector(b, op.p, name="b")
    gradient = op.rmatvec(op.matvec(x) - b)
    return kkt_residual_from_gradient(gradient, x, alpha * op.weights)


def kkt_residual_from_gradient(gradient: np.ndarray, x: np.ndarray, thresholds: np.ndarray) -> float:
    """KKT residual given g = Cᵀ(Cx − b) and the thresholds α w_i."""
    active = x != 0
    violation = np.where(
        active,
        np.abs(gradient + thresholds * np.sign(x)),
        np.maximum(np.abs(gradient) - thresholds, 0.0),
    )
    return float(violation.max()) if violation.size else 0.0


def operator_norm_sq(C: Union[np.ndarray, WeightedOperator]) -> float:
    """
    Estimate σ_max(C)² by power iteration on CᵀC.

    The start vector comes from a fixed Philox stream, so the estimate is
    deterministic. Iteration stops once the Rayleigh quotient changes by at
    most 1e-9 relative.
    """
    if isinstance(C, WeightedOperator):
        forward, adjoint, n = C.matvec, C.rmatvec, C.n
    else:
        matrix = np.asarray(C, dtype=float)
        forward, adjoint, n = matrix.__matmul__, matrix.T.__matmul__, matrix.shape[1]

    rng = np.random.Generator(np.random.Philox(0))
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)

    estimate = 0.0
    for step in range(POWER_ITERATION_MAX_STEPS):
        u = adjoint(forward(v))
        updated = float(v @ u)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        v = u / norm
        if step > 0 and abs(updated - estimate) <= POWER_ITERATION_TOLERANCE * abs(updated):
            estimate = updated
            break
        estimate = updated
    else:
        logger.warning("Power iteration stopped after %d steps", POWER_ITERATION_MAX_STEPS)

    return estimate
