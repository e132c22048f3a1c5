"""
Weighted lasso and basis pursuit solvers.

Solves min_x ½‖Cx − b‖₂² + α‖Wx‖₁ by accelerated proximal gradient with a
monotone restart, finishes with exact working-set solves, and certifies the
result with the KKT residual. Basis pursuit (min ‖Wx‖₁ subject to Cx = b)
is reached by α-continuation.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError, as_vector
from settings import default_max_iterations
from weighting import WeightedOperator
from .active_set import refine_on_working_set
from .proximal import (
    kkt_residual,
    kkt_residual_from_gradient,
    objective,
    operator_norm_sq,
    weighted_soft_threshold,
)

logger = logging.getLogger(__name__)

# Reported support: |x_i| > SUPPORT_THRESHOLD · max|x|
SUPPORT_THRESHOLD = 1e-8


BASIS_PURSUIT_ALPHA_SCALE = 1e-8
CONTINUATION_FACTOR = 10.0


class NotConverged(WeightedSparsityError):
    """Raised by SolveResult.raise_for_status; carries the best iterate."""

    def __init__(self, result: 'SolveResult'):
        self.result = result
        super().__init__(
            f"Solver stopped after {result.iterations} iterations without converging "
            f"(KKT residual {result.kkt_residual:.3e})"
        )


class AlphaTooLarge(WeightedSparsityError):
    """Raised when α >= w_j, so the single-source minimizer is zero."""
    pass


@dataclass(frozen=True)
class SolverConfig:
    """
    Parameters of the weighted lasso solver.

    Attributes:
        alpha: Regularization parameter α > 0
        max_iterations: Iteration cap (per continuation stage for basis pursuit)
        rel_tolerance: Stop when ‖x_{k+1} − x_k‖ <= rel_tolerance·‖x_{k+1}‖
        kkt_tolerance: Required KKT residual, relative to min(1, ‖Cᵀb‖∞)
        continuation_steps: Number of α stages in basis pursuit
        restart: Reset momentum whenever the objective would increase
        polish_interval: Iterations between working-set solves (0 disables)
    """
    alpha: float = 1e-4
    max_iterations: int = field(default_factory=default_max_iterations)
    rel_tolerance: float = 1e-12
    kkt_tolerance: float = 1e-8
    continuation_steps: int = 6
    restart: bool = True
    polish_interval: int = 50

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.rel_tolerance > 0 and self.kkt_tolerance > 0):
            raise ValueError("Tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")
        if self.continuation_steps < 1:
            raise ValueError(f"continuation_steps must be positive, got {self.continuation_steps}")
        if self.polish_interval < 0:
            raise ValueError(f"polish_interval must be non-negative, got {self.polish_interval}")


@dataclass
class SolveResult:
    """
    Outcome of a solve.

    Attributes:
        x: Final iterate (the best one found)
        iterations: Iterations used, summed over continuation stages
        objective_history: Objective after every accepted step
        kkt_residual: KKT residual of x
        converged: Whether the stopping rule was met
        support: Indices with |x_i| > 1e-8·max|x|
        alpha: α the final stage was solved with
        restarts: Number of momentum resets
        polished: Whether the final iterate came from a working-set solve
        feasibility_residual: ‖Cx − b‖/‖b‖ (basis pursuit only)
        alpha_path: α of every continuation stage (basis pursuit only)
    """
    x: np.ndarray
    iterations: int
    objective_history: List[float]
    kkt_residual: float
    converged: bool
    support: List[int]
    alpha: float
    restarts: int = 0
    polished: bool = False
    feasibility_residual: Optional[float] = None
    alpha_path: List[float] = field(default_factory=list)

    @property
    def objective(self) -> float:
        return self.objective_history[-1]

    def raise_for_status(self) -> 'SolveResult':
        """Raise NotConverged unless the solve converged."""
        if not self.converged:
            raise NotConverged(self)
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            'iterations': self.iterations,
            'objective': self.objective,
            'kkt_residual': self.kkt_residual,
            'converged': self.converged,
            'support': self.support,
            'alpha': self.alpha,
            'restarts': self.restarts,
            'polished': self.polished,
            'feasibility_residual': self.feasibility_residual,
            'alpha_path': self.alpha_path,
        }


def support_of(x: np.ndarray) -> List[int]:
    """Indices with |x_i| > 1e-8·max|x| (empty for x = 0)."""
    magnitude = np.abs(x)
    peak = magnitude.max() if magnitude.size else 0.0
    if peak == 0.0:
        return []
    return [int(i) for i in np.flatnonzero(magnitude > SUPPORT_THRESHOLD * peak)]


def solve_weighted_lasso(op: WeightedOperator, b: np.ndarray, cfg: SolverConfig,
                         x0: Optional[np.ndarray] = None) -> SolveResult:
    """
    Minimize ½‖Cx − b‖₂² + α‖Wx‖₁ by accelerated proximal gradient.

    The step is 1/‖C‖₂². With cfg.restart a step that would increase the
    objective while momentum is active is discarded and the momentum reset.
    The KKT bound is cfg.kkt_tolerance·min(1, ‖Cᵀb‖∞), so it never exceeds
    cfg.kkt_tolerance in absolute terms. Convergence requires that bound
    together with a relative iterate change <= cfg.rel_tolerance, or an
    exact working-set solution that passes it. Working-set solves are tried
    after the first iteration and every cfg.polish_interval iterations.
    A solve that hits the iteration cap returns the lowest-objective
    iterate with converged=False.

    Args:
        op: Weighted operator (C, W)
        b: Data vector By of length p
        cfg: Solver parameters
        x0: Warm start (defaults to 0)

    Returns:
        SolveResult

    Raises:
        DimensionMismatch: If b or x0 have the wrong length
    """
    b = as_vector(b, op.p, name="b")
    x = np.zeros(op.n) if x0 is None else as_vector(x0, op.n, name="x0").copy()
    alpha = cfg.alpha

    lipschitz = operator_norm_sq(op)
    if lipschitz == 0.0:
        raise ValueError("C is zero")
    step = 1.0 / lipschitz
    thresholds = alpha * op.weights
    step_thresholds = step * thresholds
    correlations = op.rmatvec(b)
    tolerance = cfg.kkt_tolerance * min(1.0, float(np.max(np.abs(correlations))))

    Cx = op.matvec(x)
    f_x = 0.5 * float((Cx - b) @ (Cx - b)) + float(thresholds @ np.abs(x))
    history = [f_x]
    x_best, f_best = x, f_x

    y, Cy = x, Cx
    t = 1.0
    momentum = False
    restarts = 0
    converged = False
    polished = False
    iteration = 0

    for iteration in range(1, cfg.max_iterations + 1):
        gradient = op.rmatvec(Cy - b)
        x_new = weighted_soft_threshold(y - step * gradient, step_thresholds)
        Cx_new = op.matvec(x_new)
        residual = Cx_new - b
        f_new = 0.5 * float(residual @ residual) + float(thresholds @ np.abs(x_new))

        if cfg.restart and momentum and f_new > f_x:
            y, Cy = x, Cx
            t = 1.0
            momentum = False
            restarts += 1
            continue

        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        beta = (t - 1.0) / t_new
        delta = x_new - x
        y = x_new + beta * delta
        Cy = Cx_new + beta * (Cx_new - Cx)

        scale = np.linalg.norm(x_new)
        change = np.linalg.norm(delta) / scale if scale > 0 else np.linalg.norm(delta)
        x, Cx, f_x, t = x_new, Cx_new, f_new, t_new
        momentum = True
        history.append(f_x)
        if f_x < f_best:
            x_best, f_best = x, f_x

        if change <= cfg.rel_tolerance:
            kkt = kkt_residual_from_gradient(op.rmatvec(residual), x, thresholds)
            if kkt <= tolerance:
                converged = True
                break

        if cfg.polish_interval and (iteration == 1 or iteration % cfg.polish_interval == 0):
            candidate = refine_on_working_set(op, b, alpha, x, correlations, tolerance)
            if candidate is not None:
                x = candidate
                f_x = objective(op, b, alpha, x)
                history.append(f_x)
                converged = True
                polished = True
                break

    if not converged and x_best is not x:
        x = x_best
        history.append(f_best)
    history[-1] = objective(op, b, alpha, x)

    kkt = kkt_residual(op, b, alpha, x)
    if not converged:
        logger.warning("Weighted lasso did not converge: iterations=%d kkt=%.3e alpha=%g",
                       iteration, kkt, alpha)
    else:
        logger.debug("Weighted lasso converged: iterations=%d kkt=%.3e polished=%s",
                     iteration, kkt, polished)

    return SolveResult(
        x=x,
        iterations=iteration,
        objective_history=history,
        kkt_residual=kkt,
        converged=converged,
        support=support_of(x),
        alpha=alpha,
        restarts=restarts,
        polished=polished,
    )


def solve_basis_pursuit(op: WeightedOperator, b: np.ndarray, cfg: SolverConfig) -> SolveResult:
    """
    Approximate min ‖Wx‖₁ subject to Cx = b by α-continuation.

    The weighted lasso is solved for cfg.continuation_steps values of α that
    decrease by a factor 10 and end at α_final = 1e-8·‖Cᵀb‖∞/min w_i, each
    stage warm-started from the previous one.
    """
    b = as_vector(b, op.p, name="b")
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        return SolveResult(
            x=np.zeros(op.n),
            iterations=0,
            objective_history=[0.0],
            kkt_residual=0.0,
            converged=True,
            support=[],
            alpha=cfg.alpha,
            feasibility_residual=0.0,
        )

    alpha_final = BASIS_PURSUIT_ALPHA_SCALE * np.max(np.abs(op.rmatvec(b))) / op.weights.min()
    alphas = [alpha_final * CONTINUATION_FACTOR ** (cfg.continuation_steps - 1 - k)
              for k in range(cfg.continuation_steps)]

    x = None
    total_iterations = 0
    history: List[float] = []
    restarts = 0
    result = None
    for stage, alpha in enumerate(alphas):
        stage_cfg = dataclasses.replace(cfg, alpha=alpha)
        result = solve_weighted_lasso(op, b, stage_cfg, x0=x)
        x = result.x
        total_iterations += result.iterations
        history.extend(result.objective_history)
        restarts += result.restarts
        logger.debug("Continuation stage %d/%d: alpha=%.3e converged=%s",
                     stage + 1, len(alphas), alpha, result.converged)

    feasibility = float(np.linalg.norm(op.matvec(x) - b) / norm_b)
    return dataclasses.replace(
        result,
        iterations=total_iterations,
        objective_history=history,
        restarts=restarts,
        feasibility_residual=feasibility,
        alpha_path=alphas,
    )


def closed_form_single_source(op: WeightedOperator, j: int, alpha: float) -> np.ndarray:
    """
    The minimizer γ_α e_j, γ_α = 1 − α/w_j, for data b = C e_j.

    Raises:
        AlphaTooLarge: If α >= w_j
    """
    w_j = float(op.weights[j])
    if alpha >= w_j:
        raise AlphaTooLarge(f"alpha={alpha:g} is not below w_{j}={w_j:g}")
    x = np.zeros(op.n)
    x[j] = 1.0 - alpha / w_j
    return x


def uniqueness_probe(op: WeightedOperator, b: np.ndarray, alpha: float, x: np.ndarray,
                     trials: int = 100, radius: float = 1e-3, seed: int = 0) -> float:
    """
    Smallest objective increase over random perturbations of x.

    Each trial moves x by a random direction of length radius. A positive
    return value means every sampled neighbour has a strictly larger
    objective.
    """
    x = as_vector(x, op.n)
    base = objective(op, b, alpha, x)
    rng = np.random.Generator(np.random.Philox(seed))
    gaps = []
    for _ in range(trials):
        direction = rng.standard_normal(op.n)
        direction *= radius / np.linalg.norm(direction)
        gaps.append(objective(op, b, alpha, x + direction) - base)
    return float(min(gaps))
