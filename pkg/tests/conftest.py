import numpy as np
import pytest

from goat_lab.core.config import get_settings
from goat_lab.schemas.configs import DatasetKind, DatasetSpec, NetworkConfig
from goat_lab.services.env import generate_dataset
from goat_lab.services.replay import fit_normalizer


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Point the output root at a temp dir and keep a stray .env out of the settings."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("GOAT_LAB_OUTPUT_ROOT", str(tmp_path / "runs"))
    monkeypatch.setenv("GOAT_LAB_LOG_FORMAT", "console")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def expert10():
    return generate_dataset(DatasetSpec(kind=DatasetKind.EXPERT, n_traj=10, seed=1))


@pytest.fixture(scope="session")
def nonexpert10():
    return generate_dataset(DatasetSpec(kind=DatasetKind.NONEXPERT, n_traj=10, seed=3))


@pytest.fixture(scope="session")
def normalizer(nonexpert10):
    return fit_normalizer(nonexpert10)


@pytest.fixture
def tiny_network():
    return NetworkConfig(hidden_sizes=(16, 16))
