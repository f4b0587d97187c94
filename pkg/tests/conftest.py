import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def fast_limits():
    from modscore.sandbox import RunLimits

    return RunLimits(wall_time=5.0, memory=512 * 1024 * 1024, output_cap=1024 * 1024)
