#!/usr/bin/env python3
"""
Functional tests for the properad_htt command line.

Drives main() with argument lists and checks exit codes and emitted JSON:
0 on success, 1 for failed reports and missing files, 2 for invalid input.

Usage:
    python tests/functional_tests/test_cli.py
"""

import json
import sys
from pathlib import Path

import pytest

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print
from properad_htt import main
from combinatorics.graphcore import graph_to_json
from combinatorics.reference_graphs import three_vertex


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "three_vertex.json"
    path.write_text(json.dumps(graph_to_json(three_vertex())))
    return path


@pytest.fixture
def broken_graph_file(tmp_path):
    data = graph_to_json(three_vertex())
    data["in"].remove("e1i")
    data["out"].append("e1i")
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data))
    return path


def _json_output(capsys):
    return json.loads(capsys.readouterr().out)


def test_validate_reports_violations(graph_file, broken_graph_file, capsys):
    assert main(["graphs", "validate", str(graph_file), "--format", "json"]) == 0
    assert _json_output(capsys)["valid"] is True
    assert main(["graphs", "validate", str(broken_graph_file), "--format", "json"]) == 2
    payload = _json_output(capsys)
    assert payload["valid"] is False
    assert "direction-inconsistent-on-edge" in [v["code"] for v in payload["violations"]]


def test_missing_input_file(tmp_path):
    assert main(["graphs", "validate", str(tmp_path / "nowhere.json")]) == 1


def test_canon_and_contract(graph_file, capsys):
    assert main(["graphs", "canon", str(graph_file), "--format", "json"]) == 0
    assert "graph" in _json_output(capsys)
    assert main(["graphs", "contract", str(graph_file), "--source", "v2", "--target", "v1", "--format", "json"]) == 0
    payload = _json_output(capsys)
    assert payload["admissible"] is True
    assert len(payload["graph"]["vertices"]) == 2
    assert main(["graphs", "contract", str(graph_file), "--source", "v1", "--target", "v2"]) == 2


def test_contract_needs_both_ends(graph_file):
    with pytest.raises(SystemExit) as e:
        main(["graphs", "contract", str(graph_file), "--source", "v2"])
    assert e.value.code == 2


def test_tree_enumeration_and_partner(graph_file, capsys):
    assert main(["trees", "enumerate", str(graph_file), "--format", "json"]) == 0
    assert _json_output(capsys)["counts"] == {"T": 2, "T_hat": 3}
    assert main(["trees", "partner", str(graph_file), "--format", "json"]) == 0
    assert _json_output(capsys)["passed"] is True


def test_tree_enumeration_modes(graph_file, capsys):
    assert main(["trees", "enumerate", "--graph", str(graph_file), "--mode", "binary", "--format", "json"]) == 0
    payload = _json_output(capsys)
    assert payload["counts"] == {"T": 2}
    assert "T_hat" not in payload
    assert main(["trees", "enumerate", "--graph", str(graph_file), "--mode", "general", "--format", "json"]) == 0
    payload = _json_output(capsys)
    assert payload["counts"] == {"T_hat": 3}
    assert len(payload["T_hat"]) == 3
    with pytest.raises(SystemExit) as e:
        main(["trees", "enumerate", "--mode", "binary"])
    assert e.value.code == 2


IDEMPOTENT_CONTEXT = {
    "bimodule": {"components": {"1,1": {"basis": [["u", 0]]}}},
    "properad": {"products": [["u", "u", [["u", "1"]]]], "unit": [["u", "1"]], "arities": [[1, 1]]},
    "target": {"components": {"1,1": {"basis": [["u", 0]]}}},
    "f": {"1,1": [["u", "u", "1"]]},
    "g": {"1,1": [["u", "u", "1"]]},
    "h": {"1,1": []},
}


def test_transfer_run_from_a_context_file(tmp_path, capsys):
    context = tmp_path / "ctx.json"
    context.write_text(json.dumps(IDEMPOTENT_CONTEXT))
    out = tmp_path / "out.json"
    assert main(["transfer", "run", "--context", str(context), "--max-vertices", "2", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["bound"] == 2
    assert data["instance"]["parameters"] == {"path": str(context)}
    assert "family" in data
    argv = ["transfer", "verify", "--context", str(context), "--max-vertices", "3", "--format", "json"]
    assert main(argv + ["--what", "merkulov"]) == 0
    payload = _json_output(capsys)
    assert payload["parameters"]["context"] == str(context)
    assert payload["passed"] is True


def test_transfer_context_rejects_bad_retracts(tmp_path):
    broken = dict(IDEMPOTENT_CONTEXT, g={"1,1": [["u", "u", "2"]]})
    context = tmp_path / "broken-ctx.json"
    context.write_text(json.dumps(broken))
    assert main(["transfer", "run", "--context", str(context), "--max-vertices", "2"]) == 2
    no_target = {k: v for k, v in IDEMPOTENT_CONTEXT.items() if k != "target"}
    context.write_text(json.dumps(no_target))
    assert main(["transfer", "run", "--context", str(context)]) == 2
    context.write_text(json.dumps({"name": "nothing"}))
    assert main(["transfer", "run", "--context", str(context)]) == 2


def test_instance_documents_work_as_contexts(tmp_path, capsys):
    document = tmp_path / "endo.json"
    assert main(["instance", "build", "endomorphism-dga", "--param", "dimension=3", "--seed", "4",
                 "--output", str(document)]) == 0
    argv = ["transfer", "verify", "--context", str(document), "--max-vertices", "2", "--format", "json"]
    assert main(argv + ["--what", "codifferential"]) == 0
    payload = _json_output(capsys)
    assert payload["parameters"]["instance"] == "endomorphism-dga"
    assert payload["passed"] is True
    data = json.loads(document.read_text())
    data["f"] = {}
    document.write_text(json.dumps(data))
    assert main(argv) == 2


def test_instance_build_writes_a_document(tmp_path):
    out = tmp_path / "idempotent.json"
    assert main(["instance", "build", "table-properad", "--param", "table=idempotent", "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["spec"]["kind"] == "table-properad"
    assert data["source"]["strict"] is True


def test_instance_build_rejects_bad_parameters():
    assert main(["instance", "build", "endomorphism-dga", "--param", "dimension=99"]) == 2
    assert main(["instance", "build", "hyperbolic-space"]) == 2
    assert main(["instance", "build", "endomorphism-dga", "--param", "dimension"]) == 2


def test_check_assoc_on_tables(tmp_path, capsys):
    assert main(["properad", "check-assoc", "--instance", "table-properad", "--format", "json"]) == 0
    assert _json_output(capsys)["passed"] is True
    broken = {
        "bimodule": {"components": {"1,1": {"basis": [["u", 0], ["v", 0]]}}},
        "properad": {"products": [["u", "u", [["v", "1"]]], ["v", "u", [["v", "1"]]]], "arities": [[1, 1]]},
    }
    path = tmp_path / "broken-table.json"
    path.write_text(json.dumps(broken))
    assert main(["properad", "check-assoc", "--input", str(path), "--format", "json"]) == 1
    assert _json_output(capsys)["totals"]["failed"] >= 1


def test_transfer_verify_picks_an_identity(capsys):
    argv = ["transfer", "verify", "--instance", "endomorphism-dga", "--max-vertices", "2", "--format", "json"]
    assert main(argv + ["--what", "lemma3"]) == 0
    payload = _json_output(capsys)
    assert payload["parameters"]["what"] == "lemma3"
    assert payload["passed"] is True
    with pytest.raises(SystemExit):
        main(argv + ["--what", "everything"])


def test_catalog_dump(capsys):
    assert main(["catalog", "dump", "--max-vertices", "2", "--m", "1", "--n", "1", "--format", "json"]) == 0
    payload = _json_output(capsys)
    assert payload["max_vertices"] == 2
    assert payload["graphs"]
    assert main(["catalog", "dump", "--max-vertices", "9"]) == 2


def test_suite_commands(tmp_path, capsys):
    assert main(["suite", "list"]) == 0
    assert "lemma21" in capsys.readouterr().out.split()
    out = tmp_path / "report.json"
    assert main(["suite", "run", "--name", "coassoc-example", "--output", str(out), "--format", "json"]) == 0
    assert json.loads(out.read_text())["passed"] is True
    assert main(["suite", "run", "--name", "theorem99"]) == 2


def main_tests():
    Print("STARTING", "command-line functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main_tests()
