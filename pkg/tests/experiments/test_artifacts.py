"""
Tests for artifact files and post-solve diagnostics.
"""

import json
import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / 'src'))

from models import SourceConfiguration
from fem_forward import build_grid
from experiments import (
    ArtifactError,
    localization_errors,
    read_heatmap,
    read_observation_csv,
    read_solution_csv,
    recovered_clusters,
    write_heatmap,
    write_json,
    write_observation_csv,
    write_overlap_csv,
    write_solution_csv,
)
from certificates import OverlapReport


class TestCsvArtifacts:
    """Tests for the solution and observation tables."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = build_grid(4)

    def test_solution_round_trip(self, tmp_path):
        """Test that values read back bit for bit."""
        rng = np.random.default_rng(0)
        x = rng.standard_normal(self.grid.node_count) * 1e-7
        path = write_solution_csv(x, self.grid, tmp_path / 'solution.csv')
        np.testing.assert_array_equal(read_solution_csv(path), x)

    def test_solution_header(self, tmp_path):
        """Test the column layout of solution.csv."""
        path = write_solution_csv(np.zeros(25), self.grid, tmp_path / 'solution.csv')
        lines = path.read_text().splitlines()
        assert lines[0] == 'node_index,x_coord,y_coord,value'
        assert len(lines) == 26
        assert lines[6].split(',')[:3] == ['5', '0', '0.25']

    def test_observation_round_trip(self, tmp_path):
        """Test boundary_index, value rows."""
        y = np.array([0.1, 1.0 / 3.0, -2.5e-12])
        path = write_observation_csv(y, tmp_path / 'obs' / 'observation.csv')
        assert path.read_text().splitlines()[0] == 'boundary_index,value'
        np.testing.assert_array_equal(read_observation_csv(path), y)

    def test_unwritable(self, tmp_path):
        """Test that a path below a regular file cannot be written."""
        blocker = tmp_path / 'blocker'
        blocker.write_text('')
        with pytest.raises(ArtifactError):
            write_observation_csv(np.ones(3), blocker / 'observation.csv')

    def test_overlap_csv(self, tmp_path):
        """Test the tau, ratio table."""
        report = OverlapReport(pair=(1, 2), tau_values=[0.0, 0.5], counts=[4, 0], ratios=[0.16, 0.0], n=25)
        path = write_overlap_csv(report, tmp_path / 'overlap.csv')
        lines = path.read_text().splitlines()
        assert lines[0] == 'tau,ratio'
        assert lines[1] == '0,0.16'


class TestHeatmap:
    """Tests for PGM heatmaps."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = build_grid(16)
        self.x = np.zeros(self.grid.node_count)
        self.x[144] = 1.0

    def test_unit_source(self, tmp_path):
        """Test that e_j is white at its node and black elsewhere."""
        pixels = read_heatmap(write_heatmap(self.x, self.grid, tmp_path / 'e.pgm'))
        assert pixels.shape == (17, 17)
        assert pixels[8, 8] == 255
        assert np.count_nonzero(pixels) == 1

    def test_negative_source(self, tmp_path):
        """Test that -e_j is black at its node and white elsewhere."""
        pixels = read_heatmap(write_heatmap(-self.x, self.grid, tmp_path / 'm.pgm'))
        assert pixels[8, 8] == 0
        assert np.count_nonzero(pixels == 255) == 288

    def test_orientation(self, tmp_path):
        """Test that the node at (0, 1) is the top-left pixel."""
        x = np.zeros(self.grid.node_count)
        x[self.grid.node_index(0, 16)] = 1.0
        pixels = read_heatmap(write_heatmap(x, self.grid, tmp_path / 'corner.pgm'))
        assert pixels[0, 0] == 255

    def test_constant(self, tmp_path):
        """Test that a constant vector maps to mid gray."""
        pixels = read_heatmap(write_heatmap(np.full(289, 3.0), self.grid, tmp_path / 'c.pgm'))
        assert np.all(pixels == 128)

    def test_header(self, tmp_path):
        """Test the P2 header and the min/max comment."""
        path = write_heatmap(self.x, self.grid, tmp_path / 'h.pgm')
        lines = path.read_text().splitlines()
        assert lines[0] == 'P2'
        assert lines[1] == '# min=0 max=1'
        assert lines[2] == '17 17'
        assert lines[3] == '255'

    def test_not_a_pgm(self, tmp_path):
        """Test that other files are refused."""
        path = tmp_path / 'x.pgm'
        path.write_text('P5\n1 1\n255\n0\n')
        with pytest.raises(ArtifactError):
            read_heatmap(path)


class TestJson:
    """Tests for the JSON report writer."""

    def test_non_finite_become_null(self, tmp_path):
        """Test that NaN and infinity are written as null."""
        path = write_json({'b': float('nan'), 'a': [np.float64(np.inf), np.int64(3)]}, tmp_path / 'r.json')
        assert json.loads(path.read_text()) == {'a': [None, 3], 'b': None}

    def test_sorted_keys(self, tmp_path):
        """Test that keys are written in sorted order."""
        path = write_json({'z': 1, 'a': np.array([True, False])}, tmp_path / 'r.json')
        text = path.read_text()
        assert text.index('"a"') < text.index('"z"')
        assert json.loads(text)['a'] == [True, False]


class TestDiagnostics:
    """Tests for clusters and localization errors."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = build_grid(16)

    def test_diagonal_neighbours_cluster(self):
        """Test that diagonal neighbours form one cluster peaked at the larger value."""
        a = self.grid.node_index(5, 5)
        b = self.grid.node_index(6, 6)
        x = np.zeros(289)
        x[a], x[b] = 0.3, -0.9
        assert recovered_clusters(x, self.grid, [a, b]) == [b]

    def test_separate_clusters(self):
        """Test that distant nodes form separate clusters."""
        a = self.grid.node_index(2, 2)
        b = self.grid.node_index(10, 12)
        x = np.zeros(289)
        x[a], x[b] = 1.0, 1.0
        assert sorted(recovered_clusters(x, self.grid, [a, b])) == [a, b]

    def test_small_entries_form_no_cluster(self):
        """Test that support nodes below 5% of the peak do not start a cluster."""
        a = self.grid.node_index(2, 2)
        b = self.grid.node_index(10, 12)
        x = np.zeros(289)
        x[a], x[b] = 1.0, 0.01
        assert recovered_clusters(x, self.grid, [a, b]) == [a]
        assert sorted(recovered_clusters(x, self.grid, [a, b], fraction=0.0)) == [a, b]

    def test_empty_support(self):
        """Test that nothing recovered gives no clusters and no localization error."""
        truth = SourceConfiguration.from_pairs([(144, 1.0), (20, 1.0)], n=289)
        assert recovered_clusters(np.zeros(289), self.grid, []) == []
        assert localization_errors(truth, [], self.grid) == [None, None]

    def test_localization_error(self):
        """Test the distance in cells to the nearest recovered node."""
        truth = SourceConfiguration.from_pairs([(self.grid.node_index(8, 8), 1.0)], n=289)
        support = [self.grid.node_index(10, 9), self.grid.node_index(0, 0)]
        assert localization_errors(truth, support, self.grid) == [2]
