"""
Main entry point for the weighted sparsity toolkit.

Usage:
    python main.py run --config data/scenarios/intro.json
    python main.py verify --suite all
"""

import sys
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent / 'src'))

from cli import main


if __name__ == '__main__':
    sys.exit(main())
