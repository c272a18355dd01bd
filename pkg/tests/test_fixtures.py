import json

import numpy as np
import pytest

from peercf.causal import check_graph_matches_schema, load_graph
from peercf.dataset import load_dataset, load_schema
from peercf.fixtures import (
    ELECTION_OUTCOME,
    ELECTION_TREATMENTS,
    OPIOID_OUTCOME,
    OPIOID_TREATMENTS,
    generate_opioid,
    write_chain_fixture,
    write_opioid_fixture,
)


def test_opioid_fixture_shape(fixture_dir):
    schema = load_schema(fixture_dir / "opioid.schema.json")
    with open(fixture_dir / "opioid.csv", "rb") as fh:
        ds = load_dataset(fh, schema)
    assert len(ds) == 3000
    assert schema.treatments == OPIOID_TREATMENTS
    assert schema.outcome == OPIOID_OUTCOME
    assert len(schema.treatments) == 10
    graph = load_graph(fixture_dir / "opioid.graph.json")
    check_graph_matches_schema(graph, schema)
    # the case-study chain is wired in
    assert ("pct_insufficient_sleep", "mental_unhealthy_days") in graph.edges
    assert ("mental_unhealthy_days", "opioid_death_rate") in graph.edges
    assert ("opioid_dispensing_rate", "opioid_death_rate") in graph.edges


def test_election_fixture_shape(fixture_dir):
    schema = load_schema(fixture_dir / "election.schema.json")
    with open(fixture_dir / "election.csv", "rb") as fh:
        ds = load_dataset(fh, schema)
    assert len(ds) == 3000
    assert schema.treatments == ELECTION_TREATMENTS
    assert schema.outcome == ELECTION_OUTCOME
    assert len(schema.treatments) == 9
    # signed outcome with a pinned neutral midpoint
    with open(fixture_dir / "election.config.json") as fh:
        assert json.load(fh)["midpoint"] == 0.0
    assert ds.outcomes.min() < 0 < ds.outcomes.max()


def test_generation_is_deterministic(tmp_path):
    one, _ = generate_opioid(n=50, seed=7)
    two, _ = generate_opioid(n=50, seed=7)
    for key in one:
        np.testing.assert_array_equal(one[key], two[key])
    a = write_opioid_fixture(tmp_path / "a", n=50)
    b = write_opioid_fixture(tmp_path / "b", n=50)
    assert a["data"].read_bytes() == b["data"].read_bytes()


def test_geo_features_match_units(fixture_dir):
    with open(fixture_dir / "opioid.geo.json") as fh:
        geo = json.load(fh)
    assert geo["type"] == "FeatureCollection"
    assert len(geo["features"]) == 3000
    ids = {f["properties"]["id"] for f in geo["features"]}
    schema = load_schema(fixture_dir / "opioid.schema.json")
    with open(fixture_dir / "opioid.csv", "rb") as fh:
        ds = load_dataset(fh, schema)
    assert ids == {u.id for u in ds.units}


def test_chain_fixture_fit_is_exact(tmp_path):
    paths = write_chain_fixture(tmp_path)
    schema = load_schema(paths["schema"])
    with open(paths["data"], "rb") as fh:
        ds = load_dataset(fh, schema)
    from peercf.causal import fit_scm

    graph = load_graph(paths["graph"])
    scm = fit_scm(graph, schema, list(ds.units))
    assert scm.equations["b"].coefficients[0] == pytest.approx(2.0, abs=1e-12)
    assert scm.equations["b"].intercept == pytest.approx(0.0, abs=1e-12)
    assert scm.equations["y"].coefficients[0] == pytest.approx(3.0, abs=1e-12)
    assert scm.equations["y"].intercept == pytest.approx(0.0, abs=1e-12)
