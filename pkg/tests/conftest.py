"""Shared fixtures: the published apparatus and sample tables from data/."""

from pathlib import Path
from typing import Dict

import pytest

from src.models.apparatus import ApparatusSpec, BeamProfile
from src.models.config import RunConfig
from src.models.sample import SampleSpec
from src.models.uncertainty import UncertaintyBudget
from src.repositories.config_repository import ConfigRepository

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def published_config() -> RunConfig:
    return ConfigRepository().load(DATA_DIR / "published_config.ini")


@pytest.fixture(scope="session")
def apparatus(published_config: RunConfig) -> ApparatusSpec:
    return published_config.apparatus_spec()


@pytest.fixture(scope="session")
def laser(published_config: RunConfig) -> BeamProfile:
    assert published_config.laser is not None
    return published_config.laser.to_beam()


@pytest.fixture(scope="session")
def spdc_beam(apparatus: ApparatusSpec) -> BeamProfile:
    return apparatus.spdc_beam()


@pytest.fixture(scope="session")
def samples(published_config: RunConfig) -> Dict[str, SampleSpec]:
    return ConfigRepository().sample_specs(published_config)


@pytest.fixture(scope="session")
def budget(published_config: RunConfig) -> UncertaintyBudget:
    return published_config.budget()


@pytest.fixture
def log_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Keep CLI log files out of the working tree."""
    path = tmp_path / "logs"
    monkeypatch.setenv("LOG_DIR", str(path))
    return path
