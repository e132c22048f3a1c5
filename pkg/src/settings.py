"""
Runtime settings read from the environment.

Values can be placed in a .env file at the project root; see .env.example.
"""

import os
from pathlib import Path

try:
    from dotenv import load_dotenv
    # Load .env file from project root
    env_path = Path(__file__).parent.parent / '.env'
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    pass  # python-dotenv not installed

PROJECT_ROOT = Path(__file__).parent.parent


def output_dir() -> Path:
    """Root directory for run artifacts (WSR_OUTPUT_DIR)."""
    return Path(os.getenv('WSR_OUTPUT_DIR', 'results'))


def scenario_dir() -> Path:
    """Directory holding the bundled scenario files (WSR_SCENARIO_DIR)."""
    configured = os.getenv('WSR_SCENARIO_DIR')
    if configured:
        return Path(configured)
    return PROJECT_ROOT / 'data' / 'scenarios'


def log_level() -> str:
    """Logging level name (WSR_LOG_LEVEL)."""
    return os.getenv('WSR_LOG_LEVEL', 'INFO').upper()


def default_max_iterations() -> int:
    """Solver iteration cap used when a config does not set one (WSR_MAX_ITER)."""
    return int(os.getenv('WSR_MAX_ITER', '50000'))
