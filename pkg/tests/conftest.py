import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from peercf.config import load_config
from peercf.fixtures import (
    _write_bundle,
    write_chain_fixture,
    write_election_fixture,
    write_opioid_fixture,
)
from peercf.service import AnalysisService


def write_custom_bundle(out, name, treatments, outcome, edges, matrix, midpoint=None):
    """Write a small dataset + graph + geo + config bundle for service tests."""
    matrix = np.asarray(matrix, dtype=np.float64)
    cols = {t: matrix[:, i] for i, t in enumerate(treatments)}
    cols[outcome] = matrix[:, len(treatments)]
    return _write_bundle(out, name, tuple(treatments), outcome, edges, cols, None,
                         midpoint)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("fixtures")
    write_opioid_fixture(out)
    write_election_fixture(out)
    write_chain_fixture(out)
    return out


@pytest.fixture(scope="session")
def chain_service(fixture_dir) -> AnalysisService:
    return AnalysisService(load_config(fixture_dir / "chain.config.json"))


@pytest.fixture(scope="session")
def opioid_service(fixture_dir) -> AnalysisService:
    return AnalysisService(load_config(fixture_dir / "opioid.config.json"))


@pytest.fixture(scope="session")
def election_service(fixture_dir) -> AnalysisService:
    return AnalysisService(load_config(fixture_dir / "election.config.json"))


@pytest.fixture(scope="session")
def small_service(tmp_path_factory) -> AnalysisService:
    """50 units, 3 treatments, nonlinear-ish spread; d=3 keeps oracles cheap."""
    rng = np.random.default_rng(21)
    t0 = rng.normal(0.0, 1.0, size=50)
    t1 = 0.5 * t0 + rng.normal(0.0, 0.8, size=50)
    t2 = rng.normal(2.0, 1.5, size=50)
    out = 2.0 * t0 - 1.5 * t1 + 0.7 * t2 + rng.normal(0.0, 0.3, size=50)
    paths = write_custom_bundle(
        tmp_path_factory.mktemp("small"),
        "small",
        ("t0", "t1", "t2"),
        "out",
        [("t0", "t1"), ("t0", "out"), ("t1", "out"), ("t2", "out")],
        np.column_stack([t0, t1, t2, out]),
    )
    return AnalysisService(load_config(paths["config"]))
