# conftest.py
from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))


def pytest_configure(config) -> None:
    config.addinivalue_line("markers", "slow: exhaustive oracle sweeps")
