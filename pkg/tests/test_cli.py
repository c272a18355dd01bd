import json
import socket
import subprocess
import sys
import time
import urllib.request

import pytest
from fastapi.testclient import TestClient

from peercf.cli import main
from peercf.server import create_app


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def chain_flags(fixture_dir) -> list[str]:
    return ["--config", str(fixture_dir / "chain.config.json")]


# --- validate ---------------------------------------------------------------

def test_validate_clean_fixture(capsys, fixture_dir):
    code, out, _ = run_cli(capsys, "validate", *chain_flags(fixture_dir))
    assert code == 0
    assert out.count("[pass]") == 4
    assert "[fail]" not in out


def test_validate_duplicate_id(capsys, tmp_path, fixture_dir):
    rows = (fixture_dir / "chain.csv").read_text().splitlines()
    rows.append(rows[1])  # repeat the first data row
    bad = tmp_path / "dup.csv"
    bad.write_text("\n".join(rows) + "\n")
    code, out, _ = run_cli(
        capsys, "validate", *chain_flags(fixture_dir), "--data", str(bad)
    )
    assert code == 2
    assert "[fail] duplicate_id" in out


def test_validate_graph_node_not_in_schema(capsys, tmp_path, fixture_dir):
    graph = json.loads((fixture_dir / "chain.graph.json").read_text())
    graph["nodes"].append("ghost")
    bad = tmp_path / "ghost.graph.json"
    bad.write_text(json.dumps(graph))
    code, out, _ = run_cli(
        capsys, "validate", *chain_flags(fixture_dir), "--graph", str(bad)
    )
    assert code == 2
    assert "[fail] unknown_node" in out


def test_validate_cyclic_graph(capsys, tmp_path, fixture_dir):
    graph = json.loads((fixture_dir / "chain.graph.json").read_text())
    graph["edges"].append(["b", "a"])
    bad = tmp_path / "cycle.graph.json"
    bad.write_text(json.dumps(graph))
    code, out, _ = run_cli(
        capsys, "validate", *chain_flags(fixture_dir), "--graph", str(bad)
    )
    assert code == 2
    assert "[fail] cycle_detected" in out
    assert "a" in out and "b" in out


# --- usage errors -------------------------------------------------------------

def test_missing_required_files_is_usage_error(capsys):
    code = main(["intervene", "--unit", "x", "--set", "a=1"])
    captured = capsys.readouterr()
    assert code == 1
    assert "--data" in captured.err


def test_missing_subcommand_flag_exits_one(fixture_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "peercf.cli", "intervene",
         "--config", str(fixture_dir / "chain.config.json"), "--set", "a=1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1  # --unit is required


def test_malformed_set_flag(capsys, fixture_dir):
    code, _, err = run_cli(
        capsys, "intervene", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--set", "a:2",
    )
    assert code == 1
    assert "--set" in err


def test_unknown_flag_rejected(fixture_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "peercf.cli", "validate",
         "--config", str(fixture_dir / "chain.config.json"), "--bogus"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1


# --- one-shot commands -----------------------------------------------------------

def test_intervene_at_observed_value(capsys, fixture_dir):
    code, out, _ = run_cli(
        capsys, "intervene", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--set", "a=1", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["changed"] == []
    assert payload["counterfactual"] == payload["factual"]


def test_intervene_chain_hand_case(capsys, fixture_dir):
    code, out, _ = run_cli(
        capsys, "intervene", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--set", "a=2", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["counterfactual"]["y"] == pytest.approx(14.0, abs=1e-9)


def test_intervene_engine_error_exits_two(capsys, fixture_dir):
    code, _, err = run_cli(
        capsys, "intervene", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--set", "y=2",
    )
    assert code == 2
    assert "not_a_treatment" in err


def test_explain_shap_additivity(capsys, fixture_dir):
    code, out, _ = run_cli(
        capsys, "explain", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--method", "shap", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    total = payload["baseline"] + sum(payload["attributions"].values())
    assert total == pytest.approx(payload["prediction"], abs=1e-6)


def test_explain_lime_seed_reproducible(capsys, fixture_dir):
    args = ["explain", *chain_flags(fixture_dir), "--unit", "00001", "--n", "2",
            "--method", "lime", "--seed", "42", "--json"]
    code_one, out_one, _ = run_cli(capsys, *args)
    code_two, out_two, _ = run_cli(capsys, *args)
    assert code_one == code_two == 0
    assert out_one == out_two


def test_recommend_outputs_ranked_list(capsys, fixture_dir):
    code, out, _ = run_cli(
        capsys, "recommend", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--target", "8", "--grid-size", "5", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["recommendations"][0]["attribute"] == "a"
    assert payload["recommendations"][0]["distance"] == pytest.approx(0.0, abs=1e-9)


def test_cli_json_matches_http_bytes(capsys, chain_service, fixture_dir):
    client = TestClient(create_app(chain_service))
    http = client.post(
        "/api/intervene",
        json={"unit_id": "00001", "n": 2, "attribute": "a", "value": 2.0},
    ).content
    code, out, _ = run_cli(
        capsys, "intervene", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--set", "a=2", "--json",
    )
    assert code == 0
    assert out.encode() == http + b"\n"

    http = client.post("/api/explain/shap", json={"unit_id": "00001", "n": 2}).content
    code, out, _ = run_cli(
        capsys, "explain", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--method", "shap", "--json",
    )
    assert code == 0
    assert out.encode() == http + b"\n"


def test_default_output_is_pretty_json(capsys, fixture_dir):
    code, out, _ = run_cli(
        capsys, "intervene", *chain_flags(fixture_dir),
        "--unit", "00001", "--n", "2", "--set", "a=2",
    )
    assert code == 0
    assert out.startswith("{\n")
    assert json.loads(out)["intervened_attribute"] == "a"


# --- serve ------------------------------------------------------------------------

def test_serve_prints_startup_line_and_answers(fixture_dir):
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-m", "peercf.cli", "serve",
         "--config", str(fixture_dir / "chain.config.json"), "--port", str(port)],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
    )
    try:
        line = proc.stdout.readline().strip()
        assert line == "loaded 3 units, 2 treatments"
        deadline = time.time() + 15
        payload = None
        while time.time() < deadline:
            try:
                with urllib.request.urlopen(
                    f"http://127.0.0.1:{port}/api/config", timeout=1
                ) as response:
                    payload = json.load(response)
                break
            except OSError:
                time.sleep(0.2)
        assert payload is not None and payload["outcome"] == "y"
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_serve_cyclic_graph_exits_two(tmp_path, fixture_dir):
    graph = json.loads((fixture_dir / "chain.graph.json").read_text())
    graph["edges"].append(["y", "a"])  # also violates the outcome-sink rule
    graph["edges"].append(["b", "a"])
    bad = tmp_path / "bad.graph.json"
    bad.write_text(json.dumps(graph))
    proc = subprocess.run(
        [sys.executable, "-m", "peercf.cli", "serve",
         "--config", str(fixture_dir / "chain.config.json"), "--graph", str(bad)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "outcome_has_children" in proc.stderr or "cycle_detected" in proc.stderr
