"""
The weighted operator (C = BA, W) consumed by the solvers and certificates.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError, as_vector
from .schemes import (
    Identity,
    PreOrthogonalizer,
    RandomSparse,
    TruncatedPseudoInverse,
    WeightingScheme,
    pre_orthogonalizer,
    random_sparse_b,
    truncated_pseudoinverse,
)

logger = logging.getLogger(__name__)

# A column is treated as zero when its norm is below this fraction of ‖C‖_F
ZERO_COLUMN_TOLERANCE = 1e-14

# Default tolerance on 1 - |cos| for the non-parallelism check
PARALLEL_TOLERANCE = 1e-10

# Attempts with seed, seed+1, ... before a random B is given up
RANDOM_RESAMPLE_ATTEMPTS = 8

# Columns per block in pairwise Gram scans
GRAM_BLOCK_SIZE = 512


class ZeroColumn(WeightedSparsityError):
    """Raised when a column of C vanishes, so e_i lies in Nul(C)."""

    def __init__(self, index: int, message: Optional[str] = None):
        self.index = index
        super().__init__(message or f"Column {index} of C is numerically zero")


@dataclass(frozen=True, eq=False)
class WeightedOperator:
    """
    The composite operator C = BA together with the weight matrix W.

    C is never needed in full by the solvers: products go through B and A
    separately whenever B has more rows than columns.

    Attributes:
        A: The m x n forward matrix
        B: The p x m auxiliary matrix (None for the identity)
        scheme: The weighting scheme B was built from
        column_norms: ‖C e_i‖₂ for every i
        weights: Diagonal of W; equals column_norms unless built unweighted
        weighted: False when W = I
    """
    A: np.ndarray
    B: Optional[np.ndarray]
    scheme: WeightingScheme
    column_norms: np.ndarray
    weights: np.ndarray
    weighted: bool = True

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def p(self) -> int:
        """Number of rows of C."""
        return self.A.shape[0] if self.B is None else self.B.shape[0]

    @property
    def factored(self) -> bool:
        """Products are computed as B(Ax) instead of with a stored C."""
        return self.B is not None and self.B.shape[0] > self.B.shape[1]

    @cached_property
    def C(self) -> np.ndarray:
        """Dense p x n matrix C = BA."""
        if self.B is None:
            return self.A
        return self.B @ self.A

    @cached_property
    def _b_gram(self) -> np.ndarray:
        return self.B.T @ self.B

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """C x."""
        if self.factored:
            return self.B @ (self.A @ x)
        return self.C @ x

    def rmatvec(self, r: np.ndarray) -> np.ndarray:
        """Cᵀ r."""
        if self.factored:
            return self.A.T @ (self.B.T @ r)
        return self.C.T @ r

    def column(self, i: int) -> np.ndarray:
        """C e_i."""
        if self.B is None:
            return self.A[:, i].copy()
        return self.B @ self.A[:, i]

    def columns(self, indices: Sequence[int]) -> np.ndarray:
        """Columns of C indexed by indices, as a p x len(indices) matrix."""
        indices = list(indices)
        if self.B is None:
            return self.A[:, indices]
        return self.B @ self.A[:, indices]

    def inner_products(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """Matrix of ⟨C e_i, C e_j⟩ for i in rows and j in cols."""
        rows = list(rows)
        cols = list(cols)
        if self.factored:
            return (self.A[:, rows].T @ self._b_gram) @ self.A[:, cols]
        return self.columns(rows).T @ self.columns(cols)

    def normalized_inner_products(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """Matrix of cosines ⟨C e_i/‖C e_i‖, C e_j/‖C e_j‖⟩."""
        rows = list(rows)
        cols = list(cols)
        products = self.inner_products(rows, cols)
        return products / np.outer(self.column_norms[rows], self.column_norms[cols])

    def normalized_columns(self) -> np.ndarray:
        """C W⁻¹ (columns of unit norm when weighted)."""
        return self.C / self.weights

    def data_vector(self, y: np.ndarray) -> np.ndarray:
        """Right-hand side b = B y."""
        y = as_vector(y, self.A.shape[0], name="y")
        if self.B is None:
            return y.copy()
        return self.B @ y


def _build_b(A: np.ndarray, scheme: WeightingScheme) -> Optional[np.ndarray]:
    m, n = A.shape
    if isinstance(scheme, Identity):
        return None
    if isinstance(scheme, TruncatedPseudoInverse):
        return truncated_pseudoinverse(A, scheme.k)
    if isinstance(scheme, RandomSparse):
        return random_sparse_b(scheme.p, m, scheme.density, scheme.seed)
    if isinstance(scheme, PreOrthogonalizer):
        return pre_orthogonalizer(A, scheme.indices)
    raise TypeError(f"Unknown weighting scheme: {scheme!r}")


def _column_norms(A: np.ndarray, B: Optional[np.ndarray]) -> np.ndarray:
    if B is None:
        return np.linalg.norm(A, axis=0)
    if B.shape[0] > B.shape[1]:
        # ‖BAe_i‖² = (Ae_i)ᵀ BᵀB (Ae_i)
        squared = np.einsum('ij,ij->j', A, (B.T @ B) @ A)
        return np.sqrt(np.maximum(squared, 0.0))
    return np.linalg.norm(B @ A, axis=0)


def _find_zero_column(norms: np.ndarray) -> Optional[int]:
    frobenius = np.sqrt(np.sum(norms ** 2))
    zero = np.flatnonzero(norms <= ZERO_COLUMN_TOLERANCE * frobenius)
    return int(zero[0]) if zero.size else None


def build_weighted_operator(A: np.ndarray, scheme: WeightingScheme, weighted: bool = True) -> WeightedOperator:
    """
    Build C = BA and the weights w_i = ‖C e_i‖₂.

    Args:
        A: The m x n forward matrix
        scheme: Which auxiliary operator B to use
        weighted: Use W = I instead of the column norms when False

    Returns:
        WeightedOperator

    Raises:
        ZeroColumn: If some ‖C e_i‖₂ <= 1e-14 ‖C‖_F (after all reseeding
            attempts for a random B)
        RankDeficient, DependentColumns: From the B constructors
    """
    A = np.asarray(A, dtype=float)

    attempts = RANDOM_RESAMPLE_ATTEMPTS if isinstance(scheme, RandomSparse) else 1
    for attempt in range(attempts):
        B = _build_b(A, scheme)
        norms = _column_norms(A, B)
        zero = _find_zero_column(norms)
        if zero is None:
            break
        if attempt + 1 < attempts:
            logger.warning("Random B with seed=%d leaves column %d of C empty, reseeding",
                           scheme.seed, zero)
            scheme = dataclasses.replace(scheme, seed=scheme.seed + 1)
    else:
        raise ZeroColumn(zero, f"Column {zero} of C = BA is numerically zero "
                               f"(scheme {scheme.name}, {attempts} attempt(s))")

    weights = norms.copy() if weighted else np.ones_like(norms)
    logger.debug("Weighted operator: scheme=%s p=%d n=%d w_min=%.3e w_max=%.3e",
                 scheme.name, A.shape[0] if B is None else B.shape[0], A.shape[1],
                 norms.min(), norms.max())
    return WeightedOperator(A=A, B=B, scheme=scheme, column_norms=norms,
                            weights=weights, weighted=weighted)


def check_nonparallel(C: Union[np.ndarray, WeightedOperator],
                      tol: float = PARALLEL_TOLERANCE) -> List[Tuple[int, int]]:
    """
    Find pairs of (numerically) parallel columns.

    Args:
        C: Matrix, or a WeightedOperator whose C is scanned blockwise
        tol: Pairs with 1 - |cos angle| <= tol are reported

    Returns:
        Sorted list of pairs (l, q) with l < q; empty when no two columns
        are parallel
    """
    if isinstance(C, WeightedOperator):
        op = C
    else:
        C = np.asarray(C, dtype=float)
        norms = np.linalg.norm(C, axis=0)
        op = WeightedOperator(A=C, B=None, scheme=Identity(), column_norms=norms, weights=norms)

    n = op.n
    violations = []
    for start in range(0, n, GRAM_BLOCK_SIZE):
        rows = range(start, min(start + GRAM_BLOCK_SIZE, n))
        for col_start in range(start, n, GRAM_BLOCK_SIZE):
            cols = range(col_start, min(col_start + GRAM_BLOCK_SIZE, n))
            cosines = op.normalized_inner_products(rows, cols)
            l_idx, q_idx = np.nonzero(1.0 - np.abs(cosines) <= tol)
            for l, q in zip(l_idx, q_idx):
                l, q = rows[l], cols[q]
                if l < q:
                    violations.append((l, q))
    return sorted(violations)

