"""
Scenario entry points used by the command line.

Independent scenarios can run in parallel processes; each one writes into
its own directory.
"""

import logging
import multiprocessing
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import sys

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from .config import ScenarioConfig

logger = logging.getLogger(__name__)


def _pipeline(verbose: bool = False):
    # Deferred: pipeline imports this package
    from pipeline import ScenarioPipeline
    return ScenarioPipeline(verbose=verbose)


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[Path] = None, verbose: bool = False):
    """
    Run one scenario end to end.

    Returns:
        RunArtifacts
    """
    return _pipeline(verbose).run(cfg, out_dir)


@dataclass
class JobOutcome:
    """Result of one scenario in a batch: artifacts on success, the error otherwise."""
    name: str
    artifacts: Optional[Dict[str, Any]] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_job(job) -> JobOutcome:
    cfg, out_dir, verbose = job
    try:
        artifacts = run_scenario(cfg, out_dir, verbose)
        return JobOutcome(name=cfg.name, artifacts=artifacts.to_dict())
    except Exception as e:
        logger.error("Scenario %s failed: %s", cfg.name, e)
        return JobOutcome(name=cfg.name, error=f"{type(e).__name__}: {e}")


def run_many(configs: Sequence[ScenarioConfig], out_root: Path, jobs: int = 1,
             verbose: bool = False) -> List[JobOutcome]:
    """
    Run several scenarios, each into out_root/<name>/.

    Args:
        configs: Scenarios to run
        out_root: Parent directory of the per-scenario directories
        jobs: Number of worker processes
        verbose: Step reporting inside each scenario

    Returns:
        One JobOutcome per scenario, in input order
    """
    names = [cfg.name for cfg in configs]
    if len(set(names)) != len(names):
        raise ValueError(f"Scenario names must be unique within a batch, got {names}")

    work = [(cfg, Path(out_root) / cfg.name, verbose) for cfg in configs]
    if jobs <= 1 or len(work) <= 1:
        return [_run_job(job) for job in work]

    with multiprocessing.Pool(processes=min(jobs, len(work))) as pool:
        return pool.map(_run_job, work)


def compare_schemes(cfg: ScenarioConfig, schemes: Sequence[str], out_dir: Path, verbose: bool = False):
    """Invert one observation with several B; see ScenarioPipeline.compare."""
    return _pipeline(verbose).compare(cfg, schemes, out_dir)


def sweep_overlap(cfg: ScenarioConfig, out_dir: Path, verbose: bool = False) -> Dict[str, Any]:
    """Overlap ratio sweep; see ScenarioPipeline.sweep_overlap."""
    return _pipeline(verbose).sweep_overlap(cfg, out_dir)
