"""
Main pipeline orchestrator for weighted sparsity experiments.

This module coordinates all components to run a scenario: forward model
assembly, data synthesis, weighting, the solve, diagnostics and artifacts.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
import sys

import numpy as np

sys.path.append(str(Path(__file__).parent))

from models import RunSummary, SourceConfiguration
from settings import output_dir as default_output_dir
from fem_forward import ForwardModel, assemble_forward
from weighting import WeightedOperator, build_weighted_operator
from solver import SolveResult, solve_basis_pursuit, solve_weighted_lasso
from certificates import disjointness_overlap
from experiments.config import ScenarioConfig, resolve_scheme, scheme_spec
from experiments.synthesis import place_sources, synthesize_observation
from experiments.analysis import localization_errors, recovered_clusters, run_analyses
from experiments.artifacts import (
    write_heatmap,
    write_json,
    write_observation_csv,
    write_overlap_csv,
    write_solution_csv,
)

logger = logging.getLogger(__name__)

OVERLAP_SWEEP_SCHEMES = ('identity', 'trunc_pinv', 'random_sparse')


@dataclass
class RunArtifacts:
    """
    Files written by one run and its headline numbers.

    Attributes:
        output_dir: Directory holding every file of the run
        solution_path: solution.csv
        observation_path: observation.csv
        report_path: report.json
        heatmap_paths: truth.pgm and solution.pgm
        overlap_paths: One CSV per source pair when the overlap analysis ran
        summary: Objective, KKT residual, support and localization errors
    """
    output_dir: Path
    solution_path: Path
    observation_path: Path
    report_path: Path
    heatmap_paths: List[Path]
    summary: RunSummary
    overlap_paths: List[Path] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            'output_dir': str(self.output_dir),
            'solution_path': str(self.solution_path),
            'observation_path': str(self.observation_path),
            'report_path': str(self.report_path),
            'heatmap_paths': [str(p) for p in self.heatmap_paths],
            'overlap_paths': [str(p) for p in self.overlap_paths],
            'summary': self.summary.to_dict(),
        }


class ScenarioPipeline:
    """
    End-to-end pipeline for one scenario.

    Coordinates:
    1. Forward model assembly on the inversion grid
    2. Observation synthesis (forward grid, trace transfer, noise)
    3. Weighted operator construction
    4. Weighted lasso or basis pursuit solve
    5. Diagnostics
    6. Artifact output
    """

    STEPS = 6

    def __init__(self, verbose: bool = False):
        """
        Initialize the pipeline.

        Args:
            verbose: Report every step at INFO level
        """
        self.verbose = verbose
        self._models: Dict[Tuple[int, float], ForwardModel] = {}

    def _step(self, number: int, message: str, *args) -> None:
        level = logging.INFO if self.verbose else logging.DEBUG
        logger.log(level, f"[{number}/{self.STEPS}] {message}", *args)

    def forward_model(self, N: int, epsilon: float) -> ForwardModel:
        """Forward model on the N x N grid, assembled once per (N, ε)."""
        key = (int(N), float(epsilon))
        if key not in self._models:
            self._models[key] = assemble_forward(N, epsilon)
        return self._models[key]

    def prepare(self, cfg: ScenarioConfig) -> Tuple[ForwardModel, np.ndarray, SourceConfiguration]:
        """Steps 1-2: the inversion model, the observation and the snapped truth."""
        self._step(1, "Assembling forward model (N=%d, epsilon=%g)...", cfg.inverse_N, cfg.epsilon)
        model = self.forward_model(cfg.inverse_N, cfg.epsilon)

        self._step(2, "Synthesizing observation (forward N=%d, noise %g)...", cfg.forward_N, cfg.noise.level)
        y, truth = synthesize_observation(cfg, coarse=model)
        return model, y, truth

    def solve(self, cfg: ScenarioConfig, op: WeightedOperator, y: np.ndarray) -> SolveResult:
        """Step 4: solve with the method the scenario asks for."""
        b = op.data_vector(y)
        solver_cfg = cfg.solver_config()
        self._step(4, "Solving (%s, alpha=%g)...", cfg.solver.method, solver_cfg.alpha)
        if cfg.solver.method == 'basis_pursuit':
            result = solve_basis_pursuit(op, b, solver_cfg)
        else:
            result = solve_weighted_lasso(op, b, solver_cfg)
        if not result.converged:
            logger.warning("Scenario %s: solver did not converge (KKT residual %.3e)",
                           cfg.name, result.kkt_residual)
        return result

    def run(self, cfg: ScenarioConfig, out_dir: Optional[Path] = None) -> RunArtifacts:
        """
        Run a scenario and write its artifacts.

        Args:
            cfg: Scenario
            out_dir: Target directory (defaults to cfg.output_dir, then
                WSR_OUTPUT_DIR/<name>)

        Returns:
            RunArtifacts
        """
        out_dir = Path(out_dir or cfg.output_dir or default_output_dir() / cfg.name)
        model, y, truth = self.prepare(cfg)

        spec = cfg.b_scheme
        scheme = resolve_scheme(spec, cfg, truth)
        self._step(3, "Building weighted operator (B=%s, weighted=%s)...", scheme.name, cfg.weighted)
        op = build_weighted_operator(model.A, scheme, weighted=cfg.weighted)

        result = self.solve(cfg, op, y)
        return self._finish(cfg, model, op, y, truth, result, out_dir)

    def _finish(self, cfg: ScenarioConfig, model: ForwardModel, op: WeightedOperator, y: np.ndarray,
                truth: SourceConfiguration, result: SolveResult, out_dir: Path) -> RunArtifacts:
        """Steps 5-6: diagnostics and artifacts."""
        grid = model.grid
        self._step(5, "Computing diagnostics...")
        analyses = run_analyses(op, truth, cfg.analyses)
        clusters = recovered_clusters(result.x, grid, result.support)

        summary = RunSummary(
            objective=result.objective,
            kkt_residual=result.kkt_residual,
            converged=result.converged,
            iterations=result.iterations,
            support=result.support,
            localization_error_cells=localization_errors(truth, result.support, grid),
            cluster_count=len(clusters),
        )

        self._step(6, "Writing artifacts to %s...", out_dir)
        overlap_paths = []
        overlap_reports = analyses.pop('overlap', [])
        for report in overlap_reports:
            j, k = report.pair
            overlap_paths.append(write_overlap_csv(report, out_dir / f'overlap_{j}_{k}.csv'))
        if overlap_reports:
            analyses['overlap'] = [report.to_dict() for report in overlap_reports]

        solution_path = write_solution_csv(result.x, grid, out_dir / 'solution.csv')
        observation_path = write_observation_csv(y, out_dir / 'observation.csv')
        heatmaps = [
            write_heatmap(truth.to_vector(), grid, out_dir / 'truth.pgm'),
            write_heatmap(result.x, grid, out_dir / 'solution.pgm'),
        ]
        report_path = write_json({
            'scenario': cfg.model_dump(mode='json'),
            'summary': summary.to_dict(),
            'solve': result.to_dict(),
            'truth': truth.to_dict(),
            'weighting': {
                'scheme': op.scheme.name,
                'parameters': {k: v for k, v in vars(op.scheme).items() if k != 'name'},
                'weighted': op.weighted,
                'p': op.p,
                'w_min': float(op.column_norms.min()),
                'w_max': float(op.column_norms.max()),
            },
            'clusters': clusters,
            'analyses': analyses,
        }, out_dir / 'report.json')

        logger.info("Scenario %s finished: support=%d clusters=%d converged=%s",
                    cfg.name, len(result.support), len(clusters), result.converged)
        return RunArtifacts(
            output_dir=out_dir,
            solution_path=solution_path,
            observation_path=observation_path,
            report_path=report_path,
            heatmap_paths=heatmaps,
            summary=summary,
            overlap_paths=overlap_paths,
        )

    def compare(self, cfg: ScenarioConfig, schemes: Sequence[str], out_dir: Path) -> Dict[str, RunArtifacts]:
        """
        Invert one observation with several choices of B.

        Each scheme writes into out_dir/<scheme>/, and comparison.json
        collects the summaries.
        """
        out_dir = Path(out_dir)
        model, y, truth = self.prepare(cfg)

        runs: Dict[str, RunArtifacts] = {}
        for name in schemes:
            scheme = resolve_scheme(scheme_spec(name), cfg, truth)
            self._step(3, "Building weighted operator (B=%s)...", scheme.name)
            op = build_weighted_operator(model.A, scheme, weighted=cfg.weighted)
            result = self.solve(cfg, op, y)
            runs[name] = self._finish(cfg, model, op, y, truth, result, out_dir / name)

        write_json({name: run.to_dict() for name, run in runs.items()}, out_dir / 'comparison.json')
        return runs

    def sweep_overlap(self, cfg: ScenarioConfig, out_dir: Path,
                      schemes: Sequence[str] = OVERLAP_SWEEP_SCHEMES) -> Dict[str, Any]:
        """
        Overlap ratios ν/n of every pair of true sources for several B.

        Writes overlap_<scheme>_<j>_<k>.csv files and overlap_summary.json
        with the τ at which each ratio first vanishes.
        """
        out_dir = Path(out_dir)
        self._step(1, "Assembling forward model (N=%d, epsilon=%g)...", cfg.inverse_N, cfg.epsilon)
        model = self.forward_model(cfg.inverse_N, cfg.epsilon)
        truth = place_sources(cfg, model.grid)
        if truth.s < 2:
            raise ValueError("The overlap sweep needs at least two sources")

        summary: Dict[str, Any] = {}
        for name in schemes:
            scheme = resolve_scheme(scheme_spec(name), cfg, truth)
            self._step(3, "Building weighted operator (B=%s)...", scheme.name)
            op = build_weighted_operator(model.A, scheme, weighted=cfg.weighted)
            reports = []
            for j, k in combinations(truth.support, 2):
                report = disjointness_overlap(op, j, k, cfg.analyses.overlap_taus)
                write_overlap_csv(report, out_dir / f'overlap_{name}_{j}_{k}.csv')
                reports.append(report.to_dict())
            summary[name] = reports

        write_json(summary, out_dir / 'overlap_summary.json')
        return summary
