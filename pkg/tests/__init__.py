"""
Test suite for eigensense.

Run all tests:
    python -m unittest discover tests

Run specific test file:
    python -m unittest tests.test_signal_model
    python -m unittest tests.test_rmt
    python -m unittest tests.test_detectors

The CLI tests use pytest:
    pytest tests/test_cli.py

Long acceptance runs (10^4 Monte Carlo runs per check):
    EIGENSENSE_FULL=1 python -m unittest tests.test_acceptance

Run with coverage:
    coverage run -m unittest discover tests
    coverage report
"""

import sys
from pathlib import Path

# Add parent directory to path for imports
parent_dir = Path(__file__).parent.parent
if str(parent_dir) not in sys.path:
    sys.path.insert(0, str(parent_dir))
