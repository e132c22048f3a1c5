"""
Uniform triangulated grid on the unit square.

Node ordering is row-major: node (i, j) at (i/N, j/N) has index j*(N+1) + i.
Boundary nodes are listed counterclockwise starting from the corner (0, 0).
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class Grid:
    """
    A uniform N x N cell grid of the unit square.

    Attributes:
        cells_per_side: Number of cells N along each side
        node_coordinates: (N+1)^2 x 2 array of node positions
        boundary_index_map: 4N node indices on the boundary, counterclockwise from (0, 0)
    """
    cells_per_side: int
    node_coordinates: np.ndarray
    boundary_index_map: np.ndarray

    @property
    def node_count(self) -> int:
        return (self.cells_per_side + 1) ** 2

    @property
    def boundary_node_count(self) -> int:
        return 4 * self.cells_per_side

    @property
    def h(self) -> float:
        """Cell width."""
        return 1.0 / self.cells_per_side

    def node_index(self, i: int, j: int) -> int:
        """Index of the node in column i and row j."""
        return j * (self.cells_per_side + 1) + i

    def node_ij(self, index: int) -> Tuple[int, int]:
        """Column and row (i, j) of a node index."""
        j, i = divmod(int(index), self.cells_per_side + 1)
        return i, j

    def boundary_arclength(self) -> np.ndarray:
        """Arc-length position of each boundary node along the perimeter (length 4)."""
        return np.arange(self.boundary_node_count) * self.h

    def triangles(self) -> np.ndarray:
        """
        Triangle connectivity, two triangles per cell.

        Each cell is split by the diagonal from its lower-left to its
        upper-right corner; vertices are listed counterclockwise.
        """
        N = self.cells_per_side
        i, j = np.meshgrid(np.arange(N), np.arange(N), indexing='xy')
        i = i.ravel()
        j = j.ravel()
        lower_left = j * (N + 1) + i
        lower_right = lower_left + 1
        upper_left = lower_left + (N + 1)
        upper_right = upper_left + 1
        lower = np.stack([lower_left, lower_right, upper_right], axis=1)
        upper = np.stack([lower_left, upper_right, upper_left], axis=1)
        return np.concatenate([lower, upper], axis=0)


def build_grid(N: int) -> Grid:
    """
    Build the grid with N cells per side.

    Raises:
        ValueError: If N < 2
    """
    if int(N) != N or N < 2:
        raise ValueError(f"Grid needs at least 2 cells per side, got {N}")
    N = int(N)

    ticks = np.arange(N + 1) / N
    xs, ys = np.meshgrid(ticks, ticks, indexing='xy')
    coordinates = np.stack([xs.ravel(), ys.ravel()], axis=1)

    def index(i, j):
        return j * (N + 1) + i

    bottom = [index(i, 0) for i in range(0, N)]
    right = [index(N, j) for j in range(0, N)]
    top = [index(i, N) for i in range(N, 0, -1)]
    left = [index(0, j) for j in range(N, 0, -1)]
    boundary = np.array(bottom + right + top + left, dtype=int)

    coordinates.setflags(write=False)
    boundary.setflags(write=False)
    return Grid(cells_per_side=N, node_coordinates=coordinates, boundary_index_map=boundary)


def locate_node(grid: Grid, point: Tuple[float, float]) -> int:
    """
    Index of the grid node nearest to a point in the unit square.

    Ties are broken toward the smaller node index.
    """
    x, y = float(point[0]), float(point[1])
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"Point {point} lies outside the unit square")
    offsets = grid.node_coordinates - np.array([x, y])
    distances = np.einsum('ij,ij->i', offsets, offsets)
    # argmin returns the first minimum, i.e. the smallest index on ties
    return int(np.argmin(distances))


def grid_distance_cells(grid: Grid, a: int, b: int) -> int:
    """Chebyshev distance between two nodes, counted in cells."""
    ia, ja = grid.node_ij(a)
    ib, jb = grid.node_ij(b)
    return max(abs(ia - ib), abs(ja - jb))
