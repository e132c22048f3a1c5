"""
Auxiliary operators B.

Four choices are supported: the identity, the truncated pseudoinverse A_k†,
a random sparse matrix and the pre-orthogonalizer Y† built from a candidate
support.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError

# σ_k must exceed this fraction of σ_1
RANK_TOLERANCE = 1e-12

# σ_min(Y) must exceed this fraction of σ_max(Y)
INDEPENDENCE_TOLERANCE = 1e-10


class RankDeficient(WeightedSparsityError):
    """Raised when the requested truncation goes past the numerical rank."""
    pass


class DependentColumns(WeightedSparsityError):
    """Raised when the selected columns of A are (numerically) dependent."""
    pass


@dataclass(frozen=True)
class Identity:
    """B = I."""
    name: str = 'identity'


@dataclass(frozen=True)
class TruncatedPseudoInverse:
    """B = A_k†, the pseudoinverse built from the k largest singular values."""
    k: int
    name: str = 'trunc_pinv'

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")


@dataclass(frozen=True)
class RandomSparse:
    """B_r with p rows, entries nonzero with probability density, values Uniform(0, 1)."""
    p: int
    density: float = 0.1
    seed: int = 0
    name: str = 'random_sparse'

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"p must be positive, got {self.p}")
        if not 0.0 < self.density <= 1.0:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")
        if self.seed < 0:
            raise ValueError(f"seed must be unsigned, got {self.seed}")


@dataclass(frozen=True)
class PreOrthogonalizer:
    """B = Y†, with Y the columns of A indexed by a candidate support."""
    indices: Tuple[int, ...]
    name: str = 'pre_orth'

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise ValueError(f"Indices must be distinct, got {list(self.indices)}")
        if len(self.indices) == 0:
            raise ValueError("At least one index is required")


WeightingScheme = Union[Identity, TruncatedPseudoInverse, RandomSparse, PreOrthogonalizer]


def truncated_pseudoinverse(A: np.ndarray, k: int) -> np.ndarray:
    """
    Truncated SVD pseudoinverse Σ_{i<=k} σ_i⁻¹ v_i u_iᵀ.

    Args:
        A: m x n matrix
        k: Number of singular values to keep

    Returns:
        n x m matrix A_k†

    Raises:
        ValueError: If k is not in [1, min(m, n)]
        RankDeficient: If σ_k <= 1e-12 σ_1
    """
    A = np.asarray(A, dtype=float)
    if not 1 <= k <= min(A.shape):
        raise ValueError(f"k={k} must lie in [1, {min(A.shape)}] for a {A.shape[0]}x{A.shape[1]} matrix")

    U, sigma, Vt = np.linalg.svd(A, full_matrices=False)
    if sigma[k - 1] <= RANK_TOLERANCE * sigma[0]:
        raise RankDeficient(
            f"σ_{k} = {sigma[k - 1]:.3e} is below the rank tolerance of σ_1 = {sigma[0]:.3e}"
        )
    return (Vt[:k].T / sigma[:k]) @ U[:, :k].T


def random_sparse_b(p: int, m: int, density: float, seed: int) -> np.ndarray:
    """
    Random sparse p x m matrix from a Philox stream.

    Each entry is kept with probability density; kept values are drawn from
    Uniform(0, 1) by Generator.random. The same seed always yields the same
    matrix.
    """
    if p < 1 or m < 1:
        raise ValueError(f"Shape must be positive, got {p}x{m}")
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must lie in (0, 1], got {density}")

    rng = np.random.Generator(np.random.Philox(seed))
    mask = rng.random((p, m)) < density
    values = rng.random((p, m))
    return np.where(mask, values, 0.0)


def pre_orthogonalizer(A: np.ndarray, indices) -> np.ndarray:
    """
    Pseudoinverse Y† of the column submatrix Y = A[:, J].

    Y†A e_{j_k} is the k-th unit vector for every j_k in J.

    Raises:
        ValueError: If the indices are repeated, out of range or more than m
        DependentColumns: If σ_min(Y) <= 1e-10 σ_max(Y)
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    J = [int(j) for j in indices]
    if len(set(J)) != len(J):
        raise ValueError(f"Indices must be distinct, got {J}")
    if not J or len(J) > m:
        raise ValueError(f"Need between 1 and {m} indices, got {len(J)}")
    if any(not 0 <= j < n for j in J):
        raise ValueError(f"Indices must lie in [0, {n}), got {J}")

    Y = A[:, J]
    U, sigma, Vt = np.linalg.svd(Y, full_matrices=False)
    if sigma[-1] <= INDEPENDENCE_TOLERANCE * sigma[0]:
        raise DependentColumns(
            f"Columns {J} are linearly dependent (σ_min/σ_max = {sigma[-1] / sigma[0]:.3e})"
        )
    return (Vt.T / sigma) @ U.T
