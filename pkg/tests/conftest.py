"""
Root conftest.py: puts src/ on the path and provides shared fixtures.
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the src directory to Python's module search path
project_root = Path(__file__).parent.parent
src_dir = project_root / "src"
if str(src_dir) not in sys.path:
    sys.path.insert(0, str(src_dir))

from levy_sysid.models.noise_params import NoiseKind, NoiseParams  # noqa: E402
from levy_sysid.models.system_params import SystemParams  # noqa: E402
from levy_sysid.storage.base import ReportStoreProvider  # noqa: E402

CONFIG_DIR = project_root / "configs"


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def gaussian() -> NoiseParams:
    return NoiseParams(kind=NoiseKind.GAUSSIAN, eta=(1.0,))


@pytest.fixture
def mixture() -> NoiseParams:
    return NoiseParams.model_validate(
        {"kind": "gaussian_mixture", "params": {"weights": [0.9, 0.1], "sigmas": [0.1, 3.0]}}
    )


@pytest.fixture
def variance_gamma() -> NoiseParams:
    return NoiseParams(kind=NoiseKind.VARIANCE_GAMMA, eta=(1.0, 1.0, 0.0))


@pytest.fixture
def arma11() -> SystemParams:
    return SystemParams(ar=(-0.5,), ma=(0.3,))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def reset_report_store():
    """Every test starts with the in-memory default store."""
    ReportStoreProvider.set_store(None)
    yield
    ReportStoreProvider.set_store(None)
