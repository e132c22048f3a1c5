"""
Exact weighted lasso solutions on a working set of columns.

The weighted problem is rewritten in z = Wx with the normalized columns
Ĉ = CW⁻¹, which turns α‖Wx‖₁ into α‖z‖₁. On a working set S the reduced
problem min ½‖Ĉ_S z − b‖² + α‖z‖₁ is solved exactly by following its
homotopy path from λ = ‖Ĉ_Sᵀb‖∞ down to α. Columns outside S that violate
the optimality conditions are added and the path is recomputed.
"""

import logging
from typing import Iterable, Optional, Set

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from weighting import WeightedOperator
from .proximal import kkt_residual_from_gradient

logger = logging.getLogger(__name__)

# Columns seeded from each score (|Cᵀb|/w, |g|/w, |x|)
WORKING_SET_SEED = 32

# Most violating columns added per round
WORKING_SET_GROWTH = 64

WORKING_SET_ROUNDS = 30

# Homotopy breakpoints allowed per working-set column
PATH_STEPS_PER_COLUMN = 20

# Denominators below this are treated as zero
PATH_TOLERANCE = 1e-14


def _largest(scores: np.ndarray, count: int) -> Iterable[int]:
    order = np.argsort(-scores, kind='stable')[:count]
    return (int(i) for i in order if scores[i] > 0)


def _entering(c: np.ndarray, a: np.ndarray, lam: float, inactive: np.ndarray):
    """Smallest step at which an inactive correlation reaches ±λ."""
    best_gamma, best_index, best_sign = np.inf, -1, 0.0
    for sign in (1.0, -1.0):
        denominator = 1.0 - sign * a
        usable = inactive & (denominator > PATH_TOLERANCE)
        if not usable.any():
            continue
        gammas = np.full(c.shape, np.inf)
        gammas[usable] = np.maximum((lam - sign * c[usable]) / denominator[usable], 0.0)
        k = int(np.argmin(gammas))
        if gammas[k] < best_gamma:
            best_gamma, best_index, best_sign = float(gammas[k]), k, sign
    return best_gamma, best_index, best_sign


def lasso_path(G: np.ndarray, q: np.ndarray, alpha: float) -> Optional[np.ndarray]:
    """
    Minimize ½zᵀGz − qᵀz + α‖z‖₁ by homotopy in the regularization parameter.

    Args:
        G: Gram matrix of the (normalized) columns
        q: Correlations of the columns with the data
        alpha: Final regularization parameter

    Returns:
        The minimizer, or None when the path breaks down (a singular active
        Gram block or too many breakpoints)
    """
    size = q.shape[0]
    z = np.zeros(size)
    if size == 0:
        return z
    c = q.astype(float).copy()
    lam = float(np.max(np.abs(c)))
    if lam <= alpha:
        return z

    first = int(np.argmax(np.abs(c)))
    active = [first]
    signs = [float(np.sign(c[first]))]
    dropped = -1

    for _ in range(PATH_STEPS_PER_COLUMN * size + 10):
        I = np.array(active)
        s = np.array(signs)
        try:
            d = np.linalg.solve(G[np.ix_(I, I)], s)
        except np.linalg.LinAlgError:
            return None
        a = G[:, I] @ d

        inactive = np.ones(size, dtype=bool)
        inactive[I] = False
        if dropped >= 0:
            inactive[dropped] = False
        gamma_in, entering, entering_sign = _entering(c, a, lam, inactive)

        with np.errstate(divide='ignore', invalid='ignore'):
            ratios = -z[I] / d
        ratios = np.where(ratios > 0, ratios, np.inf)
        leaving = int(np.argmin(ratios))
        gamma_out = float(ratios[leaving])

        gamma_end = lam - alpha
        gamma = min(gamma_end, gamma_in, gamma_out)
        z[I] += gamma * d
        c -= gamma * a
        lam -= gamma
        dropped = -1

        if gamma == gamma_end:
            break
        if gamma_out <= gamma_in:
            dropped = int(I[leaving])
            z[dropped] = 0.0
            del active[leaving]
            del signs[leaving]
            if not active:
                first = int(np.argmax(np.abs(c)))
                lam = float(abs(c[first]))
                if lam <= alpha:
                    return z
                active, signs, dropped = [first], [float(np.sign(c[first]))], -1
        else:
            active.append(entering)
            signs.append(entering_sign)
    else:
        logger.debug("Homotopy path exceeded its step budget on %d columns", size)
        return None

    # Refit on the final active set; kept only when the signs survive
    I = np.array(active)
    s = np.array(signs)
    try:
        refit = np.linalg.solve(G[np.ix_(I, I)], q[I] - alpha * s)
    except np.linalg.LinAlgError:
        return z
    if np.all(np.sign(refit) == s):
        z = np.zeros(size)
        z[I] = refit
    return z


def _initial_working_set(op: WeightedOperator, x: np.ndarray, gradient: np.ndarray,
                         correlations: np.ndarray) -> Set[int]:
    w = op.weights
    working = set(_largest(np.abs(correlations) / w, WORKING_SET_SEED))
    working.update(_largest(np.abs(gradient) / w, WORKING_SET_SEED))
    working.update(_largest(np.abs(x), 4 * WORKING_SET_SEED))
    return working


def refine_on_working_set(op: WeightedOperator, b: np.ndarray, alpha: float, x: np.ndarray,
                          correlations: np.ndarray, tolerance: float) -> Optional[np.ndarray]:
    """
    Exact weighted lasso minimizer identified from the iterate x.

    The working set starts from the columns with the largest |Cᵀb|_i/w_i,
    the largest |g_i|/w_i at x (g = Cᵀ(Cx − b)) and the support of x. After
    each exact solve on the working set the full KKT residual is checked;
    columns with |g_i| > α w_i outside the set are added, most violating
    first.

    Args:
        op: Weighted operator (C, W)
        b: Data vector
        alpha: Regularization parameter
        x: Current iterate
        correlations: Cᵀb
        tolerance: Required KKT residual

    Returns:
        A minimizer whose KKT residual is <= tolerance, or None
    """
    w = op.weights
    thresholds = alpha * w
    gradient = op.rmatvec(op.matvec(x) - b)
    working = _initial_working_set(op, x, gradient, correlations)
    if not working:
        return None

    for round_ in range(WORKING_SET_ROUNDS):
        S = np.array(sorted(working))
        G = op.inner_products(S, S) / np.outer(w[S], w[S])
        z = lasso_path(G, correlations[S] / w[S], alpha)
        if z is None:
            return None

        candidate = np.zeros(op.n)
        candidate[S] = z / w[S]
        gradient = op.rmatvec(op.matvec(candidate) - b)
        kkt = kkt_residual_from_gradient(gradient, candidate, thresholds)
        if kkt <= tolerance:
            logger.debug("Working set solve accepted: rounds=%d size=%d kkt=%.3e",
                         round_ + 1, S.size, kkt)
            return candidate

        violation = (np.abs(gradient) - thresholds) / w
        violation[S] = -np.inf
        outside = np.flatnonzero(violation > 0)
        if outside.size == 0:
            return None
        order = np.argsort(-violation[outside], kind='stable')[:WORKING_SET_GROWTH]
        working.update(int(i) for i in outside[order])

    return None
