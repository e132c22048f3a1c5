"""
Artifact writers and readers.

Numbers are written with 17 significant digits so that CSV files read back
to the exact same floats. Heatmaps are plain-text PGM (P2) images.
"""

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

import sys

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError, as_vector
from fem_forward import Grid

FLOAT_FORMAT = '%.17g'


class ArtifactError(WeightedSparsityError):
    """Raised when an artifact cannot be written or read."""
    pass


def _prepare(path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ArtifactError(f"Cannot create directory {path.parent}: {e}") from e
    return path


def write_solution_csv(x: np.ndarray, grid: Grid, path) -> Path:
    """Write node_index, x_coord, y_coord, value for every node."""
    x = as_vector(x, grid.node_count)
    path = _prepare(path)
    table = np.column_stack([np.arange(grid.node_count), grid.node_coordinates, x])
    try:
        np.savetxt(path, table, delimiter=',', fmt=['%d', FLOAT_FORMAT, FLOAT_FORMAT, FLOAT_FORMAT],
                   header='node_index,x_coord,y_coord,value', comments='')
    except OSError as e:
        raise ArtifactError(f"Cannot write {path}: {e}") from e
    return path


def read_solution_csv(path) -> np.ndarray:
    """Values column of a solution.csv, ordered by node index."""
    try:
        table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    except (OSError, ValueError) as e:
        raise ArtifactError(f"Cannot read {path}: {e}") from e
    order = np.argsort(table[:, 0], kind='stable')
    return table[order, 3]


def write_observation_csv(y: np.ndarray, path) -> Path:
    """Write boundary_index, value for every boundary node."""
    y = np.asarray(y, dtype=float)
    path = _prepare(path)
    table = np.column_stack([np.arange(y.shape[0]), y])
    try:
        np.savetxt(path, table, delimiter=',', fmt=['%d', FLOAT_FORMAT],
                   header='boundary_index,value', comments='')
    except OSError as e:
        raise ArtifactError(f"Cannot write {path}: {e}") from e
    return path


def read_observation_csv(path) -> np.ndarray:
    """Values column of an observation.csv, ordered by boundary index."""
    try:
        table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    except (OSError, ValueError) as e:
        raise ArtifactError(f"Cannot read {path}: {e}") from e
    order = np.argsort(table[:, 0], kind='stable')
    return table[order, 1]


def heatmap_pixels(x: np.ndarray, grid: Grid) -> np.ndarray:
    """
    Gray levels of the heatmap as an (N+1) x (N+1) array, top row first.

    Pixel = round(255·(x − min)/(max − min)); a constant x gives 128.
    """
    x = as_vector(x, grid.node_count)
    side = grid.cells_per_side + 1
    low, high = float(x.min()), float(x.max())
    if high > low:
        levels = np.rint(255.0 * (x - low) / (high - low)).astype(int)
    else:
        levels = np.full(x.shape[0], 128, dtype=int)
    # Node rows run bottom to top; images run top to bottom
    return levels.reshape(side, side)[::-1]


def write_heatmap(x: np.ndarray, grid: Grid, path) -> Path:
    """
    Write x as an ASCII PGM (P2) image of size (N+1) x (N+1).

    The header comment records min and max so the values can be recovered.

    Raises:
        ArtifactError: If the file cannot be written
    """
    pixels = heatmap_pixels(x, grid)
    x = np.asarray(x, dtype=float)
    side = pixels.shape[0]
    lines = [
        'P2',
        f'# min={FLOAT_FORMAT % x.min()} max={FLOAT_FORMAT % x.max()}',
        f'{side} {side}',
        '255',
    ]
    lines.extend(' '.join(str(level) for level in row) for row in pixels)
    path = _prepare(path)
    try:
        path.write_text('\n'.join(lines) + '\n', encoding='ascii')
    except OSError as e:
        raise ArtifactError(f"Cannot write {path}: {e}") from e
    return path


def read_heatmap(path) -> np.ndarray:
    """Pixel array of a P2 file written by write_heatmap, top row first."""
    try:
        tokens = [line for line in Path(path).read_text(encoding='ascii').splitlines()
                  if not line.startswith('#')]
    except OSError as e:
        raise ArtifactError(f"Cannot read {path}: {e}") from e
    if not tokens or tokens[0].strip() != 'P2':
        raise ArtifactError(f"{path} is not a P2 image")
    width, height = (int(v) for v in tokens[1].split())
    values = np.array(' '.join(tokens[3:]).split(), dtype=int)
    return values.reshape(height, width)


def to_jsonable(value: Any) -> Any:
    """Convert numpy types and non-finite floats (to None) recursively."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(data: Any, path) -> Path:
    """Write data as JSON with sorted keys."""
    path = _prepare(path)
    try:
        path.write_text(json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False) + '\n',
                        encoding='utf-8')
    except OSError as e:
        raise ArtifactError(f"Cannot write {path}: {e}") from e
    return path


def write_overlap_csv(report, path) -> Path:
    """Two-column tau, ratio table of an OverlapReport."""
    path = _prepare(path)
    table = np.column_stack([report.tau_values, report.ratios])
    try:
        np.savetxt(path, table, delimiter=',', fmt=FLOAT_FORMAT, header='tau,ratio', comments='')
    except OSError as e:
        raise ArtifactError(f"Cannot write {path}: {e}") from e
    return path
