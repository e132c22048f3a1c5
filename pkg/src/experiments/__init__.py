"""
Scenario engine.

Loads declarative scenario files, synthesizes observations without inverse
crimes, runs the solvers and diagnostics, and writes CSV/JSON/PGM artifacts.

Main entry point:
    from experiments import load_scenario, run_scenario
    artifacts = run_scenario(load_scenario("data/scenarios/intro.json"))
"""

from .config import (
    ScenarioConfig,
    SourceSpec,
    NoiseSpec,
    SolverSettings,
    Analyses,
    ParseError,
    ValidationError,
    load_scenario,
    parse_scenario,
    resolve_scheme,
    scheme_spec,
)
from .noise import ZeroData, add_noise
from .synthesis import place_sources, synthesize_observation
from .artifacts import (
    ArtifactError,
    write_solution_csv,
    read_solution_csv,
    write_observation_csv,
    read_observation_csv,
    write_heatmap,
    read_heatmap,
    write_json,
    write_overlap_csv,
)
from .analysis import recovered_clusters, localization_errors, run_analyses
from .runner import JobOutcome, run_scenario, run_many, compare_schemes, sweep_overlap
from .verification import CheckResult, SUITES, run_suite

__all__ = [
    'ScenarioConfig',
    'SourceSpec',
    'NoiseSpec',
    'SolverSettings',
    'Analyses',
    'ParseError',
    'ValidationError',
    'load_scenario',
    'parse_scenario',
    'resolve_scheme',
    'scheme_spec',
    'ZeroData',
    'add_noise',
    'place_sources',
    'synthesize_observation',
    'ArtifactError',
    'write_solution_csv',
    'read_solution_csv',
    'write_observation_csv',
    'read_observation_csv',
    'write_heatmap',
    'read_heatmap',
    'write_json',
    'write_overlap_csv',
    'recovered_clusters',
    'localization_errors',
    'run_analyses',
    'JobOutcome',
    'run_scenario',
    'run_many',
    'compare_schemes',
    'sweep_overlap',
    'CheckResult',
    'SUITES',
    'run_suite',
]
