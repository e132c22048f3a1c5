"""
P1 finite element assembly and the discrete forward operator.

The boundary value problem is -Δu + εu = f in the unit square with a zero
Neumann condition. For a nodal source vector x the discrete solution is
u = L⁻¹Mx with L = K + εM, and the forward operator maps x to the
mass-weighted boundary trace

    A x = M_∂^{1/2} (L⁻¹ M x)|∂Ω
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError, as_vector
from .grid import Grid, build_grid

logger = logging.getLogger(__name__)

# Relative pivot size below which L is treated as singular
PIVOT_TOLERANCE = 1e-12

# Number of right-hand sides per block when forming A
SOLVE_BLOCK_SIZE = 64

_LOCAL_MASS = np.array([[2.0, 1.0, 1.0],
                        [1.0, 2.0, 1.0],
                        [1.0, 1.0, 2.0]]) / 12.0

_EDGE_MASS = np.array([[2.0, 1.0],
                       [1.0, 2.0]]) / 6.0


class SingularOperator(WeightedSparsityError):
    """Raised when L = K + εM cannot be factorized."""
    pass


def assemble_matrices(grid: Grid) -> Tuple[sp.csr_matrix, sp.csr_matrix, np.ndarray]:
    """
    Assemble the stiffness, mass and boundary mass matrices.

    Args:
        grid: The triangulated grid

    Returns:
        (K, M, M_boundary): sparse stiffness and mass matrices of size n x n,
        and the dense m x m boundary mass matrix in boundary ordering
    """
    triangles = grid.triangles()
    coords = grid.node_coordinates[triangles]
    x = coords[:, :, 0]
    y = coords[:, :, 1]

    # Gradients of the barycentric coordinates, scaled by 2|T|
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    det = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    area = 0.5 * np.abs(det)

    local_stiffness = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (4.0 * area[:, None, None])
    local_mass = area[:, None, None] * _LOCAL_MASS[None, :, :]

    rows = np.repeat(triangles, 3, axis=1).ravel()
    cols = np.tile(triangles, (1, 3)).ravel()
    n = grid.node_count

    K = sp.coo_matrix((local_stiffness.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((local_mass.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    m = grid.boundary_node_count
    M_boundary = np.zeros((m, m))
    for k in range(m):
        edge = [k, (k + 1) % m]
        M_boundary[np.ix_(edge, edge)] += grid.h * _EDGE_MASS

    logger.debug("assembled N=%d n=%d m=%d", grid.cells_per_side, n, m)
    return K, M, M_boundary


def symmetric_sqrt(S: np.ndarray) -> np.ndarray:
    """Square root of a symmetric positive definite matrix via eigendecomposition."""
    eigenvalues, eigenvectors = np.linalg.eigh(S)
    if eigenvalues[0] <= 0:
        raise ValueError("Matrix is not positive definite")
    root = (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.T
    return 0.5 * (root + root.T)


def factorize(L: sp.spmatrix) -> Any:
    """
    LU-factorize L, rejecting (numerically) singular matrices.

    Raises:
        SingularOperator: If the factorization fails or the smallest pivot
            is negligible relative to the largest
    """
    try:
        factor = splu(sp.csc_matrix(L))
    except RuntimeError as e:
        raise SingularOperator(f"Factorization of L failed: {e}") from e

    pivots = np.abs(factor.U.diagonal())
    ratio = pivots.min() / pivots.max()
    if not np.isfinite(ratio) or ratio <= PIVOT_TOLERANCE:
        raise SingularOperator(f"L is numerically singular (pivot ratio {ratio:.3e})")
    return factor


@dataclass(frozen=True, eq=False)
class ForwardModel:
    """
    The assembled forward operator and the matrices it is built from.

    Attributes:
        grid: Grid the model lives on
        epsilon: Coefficient of the zero order term
        A: Dense m x n forward matrix (None when assembled without it)
        stiffness_plus_mass: L = K + εM
        mass: M
        boundary_mass: Assembled boundary mass matrix M_∂
        boundary_mass_sqrt: M_∂^{1/2}
    """
    grid: Grid
    epsilon: float
    A: Optional[np.ndarray]
    stiffness_plus_mass: sp.csr_matrix
    mass: sp.csr_matrix
    boundary_mass: np.ndarray
    boundary_mass_sqrt: np.ndarray
    factor: Any = field(repr=False, default=None)

    @property
    def m(self) -> int:
        return self.grid.boundary_node_count

    @property
    def n(self) -> int:
        return self.grid.node_count

    def solve_field(self, x: np.ndarray) -> np.ndarray:
        """Full nodal field u = L⁻¹Mx for a source vector x."""
        x = as_vector(x, self.n)
        return self.factor.solve(self.mass @ x)

    def boundary_trace(self, x: np.ndarray) -> np.ndarray:
        """Boundary values of u = L⁻¹Mx, before M_∂^{1/2} is applied."""
        return self.solve_field(x)[self.grid.boundary_index_map]


def _boundary_rows_of_solution_operator(grid: Grid, factor: Any, M: sp.csr_matrix) -> np.ndarray:
    """
    The m x n matrix (L⁻¹M) restricted to boundary rows.

    Because L and M are symmetric, its transpose is M L⁻¹ Rᵀ, so only m
    solves with boundary unit vectors are needed.
    """
    n = grid.node_count
    boundary = grid.boundary_index_map
    m = boundary.shape[0]
    Z = np.empty((n, m))
    for start in range(0, m, SOLVE_BLOCK_SIZE):
        stop = min(start + SOLVE_BLOCK_SIZE, m)
        rhs = np.zeros((n, stop - start))
        rhs[boundary[start:stop], np.arange(stop - start)] = 1.0
        Z[:, start:stop] = factor.solve(rhs)
    return np.asarray((M @ Z).T)


def assemble_forward(N: int, epsilon: float, compute_operator: bool = True) -> ForwardModel:
    """
    Assemble the forward model on the N x N grid.

    Args:
        N: Cells per side (N >= 2)
        epsilon: Coefficient ε in -Δu + εu = f
        compute_operator: Form the dense matrix A (skip it for data-only grids)

    Returns:
        ForwardModel with L factorized once

    Raises:
        ValueError: If N < 2
        SingularOperator: If L is singular
    """
    grid = build_grid(N)
    K, M, M_boundary = assemble_matrices(grid)
    L = (K + epsilon * M).tocsr()
    factor = factorize(L)
    M_boundary_sqrt = symmetric_sqrt(M_boundary)

    A = None
    if compute_operator:
        A = M_boundary_sqrt @ _boundary_rows_of_solution_operator(grid, factor, M)
        A.setflags(write=False)

    logger.info("Forward model assembled: N=%d epsilon=%g m=%d n=%d", N, epsilon,
                grid.boundary_node_count, grid.node_count)
    return ForwardModel(
        grid=grid,
        epsilon=float(epsilon),
        A=A,
        stiffness_plus_mass=L,
        mass=M,
        boundary_mass=M_boundary,
        boundary_mass_sqrt=M_boundary_sqrt,
        factor=factor,
    )


def apply_forward(model: ForwardModel, x: np.ndarray) -> np.ndarray:
    """
    Compute A·x with the stored matrix.

    Raises:
        DimensionMismatch: If x does not have length n
    """
    x = as_vector(x, model.n)
    if model.A is None:
        return model.boundary_mass_sqrt @ model.boundary_trace(x)
    return model.A @ x
