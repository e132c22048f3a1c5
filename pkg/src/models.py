"""
Core data models shared by the weighted sparsity toolkit.

These models define the data structures passed between the forward model,
the weighting operators, the solvers and the experiment harness.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple, Any

import numpy as np


class WeightedSparsityError(Exception):
    """Base class for every error raised by the toolkit."""
    pass


class DimensionMismatch(WeightedSparsityError):
    """Raised when a vector or matrix does not have the expected shape."""
    pass


def as_vector(x: Any, length: int, name: str = "x") -> np.ndarray:
    """
    Convert x to a 1-D float array and check its length.

    Raises:
        DimensionMismatch: If x is not a vector of the given length
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise DimensionMismatch(
            f"{name} must be a vector of length {length}, got shape {arr.shape}"
        )
    return arr


@dataclass(frozen=True)
class SourceConfiguration:
    """
    A sparse source x* = sum over J of x_j* e_j.

    Attributes:
        entries: (node index, amplitude) pairs with distinct indices
        n: Length of the coefficient vector the indices refer to
    """
    entries: Tuple[Tuple[int, float], ...]
    n: int

    def __post_init__(self):
        indices = [j for j, _ in self.entries]
        if len(set(indices)) != len(indices):
            raise ValueError(f"Source indices must be distinct, got {indices}")
        for j, amplitude in self.entries:
            if not 0 <= j < self.n:
                raise ValueError(f"Source index {j} outside [0, {self.n})")
            if amplitude == 0:
                raise ValueError(f"Source amplitude at index {j} must be nonzero")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, float]], n: int) -> 'SourceConfiguration':
        """Build a configuration, sorted by index."""
        entries = tuple(sorted((int(j), float(a)) for j, a in pairs))
        return cls(entries=entries, n=n)

    @classmethod
    def from_vector(cls, x: Sequence[float], threshold: float = 0.0) -> 'SourceConfiguration':
        """Build a configuration from the components of x with |x_j| > threshold."""
        arr = np.asarray(x, dtype=float)
        pairs = [(int(j), float(arr[j])) for j in np.flatnonzero(np.abs(arr) > threshold)]
        return cls.from_pairs(pairs, n=arr.shape[0])

    @property
    def support(self) -> List[int]:
        """The index set J."""
        return [j for j, _ in self.entries]

    @property
    def s(self) -> int:
        """Number of sources |J|."""
        return len(self.entries)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([a for _, a in self.entries], dtype=float)

    @property
    def signs(self) -> np.ndarray:
        return np.sign(self.amplitudes)

    def has_uniform_sign(self) -> bool:
        """Check whether all amplitudes share one sign."""
        signs = self.signs
        return bool(signs.size > 0 and np.all(signs == signs[0]))

    def to_vector(self) -> np.ndarray:
        """Dense coefficient vector of length n."""
        x = np.zeros(self.n)
        for j, amplitude in self.entries:
            x[j] = amplitude
        return x

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            'support': self.support,
            'amplitudes': [a for _, a in self.entries],
            'n': self.n,
        }


@dataclass
class RunSummary:
    """Headline numbers of one scenario run."""
    objective: float
    kkt_residual: float
    converged: bool
    iterations: int
    support: List[int]
    localization_error_cells: List[Any] = field(default_factory=list)
    cluster_count: int = 0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            'objective': self.objective,
            'kkt_residual': self.kkt_residual,
            'converged': self.converged,
            'iterations': self.iterations,
            'support': self.support,
            'localization_error_cells': self.localization_error_cells,
            'cluster_count': self.cluster_count,
        }
