#!/usr/bin/env python3
"""
Functional tests for the verification suites.

Runs the cheaper suites end to end on small bounds and checks that the
reports pass, stay in a deterministic order and serialize.

Usage:
    python tests/functional_tests/test_suites.py
"""

import copy
import json
import sys
from pathlib import Path

import pytest

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print, import_plugins, load_json
from suites import SUITE_REGISTRY, get_suite, run_suite
from suites.base import SuiteOptions, map_checks
from suites.transfer_suites import leg_swap
from instances.base import InstanceSpec, resolve_parameters
from combinatorics.graphcore import corolla, line_graph
from combinatorics.reference_graphs import three_vertex

SUITES = ["graph-laws", "tree-laws", "lemma21", "lemma22", "lemma31", "eq1", "coassoc-example", "bar-square",
          "theorem31", "prop31", "theorem32", "prop32", "merkulov"]


@pytest.fixture(scope="module")
def config():
    data = copy.deepcopy(load_json(repo_root / "config" / "config.json"))
    data["verification"]["max_decorations_per_graph"] = 8
    data["verification"]["seeds"] = 2
    data["verification"]["lemma22_seeds"] = 4
    data["instances"]["endomorphism-dga"]["dimension"] = 3
    data["instances"]["commutative-properad"]["weight"] = 1
    return data


def test_every_suite_is_registered():
    assert list(SUITE_REGISTRY) == SUITES
    with pytest.raises(ValueError) as e:
        get_suite("theorem99", {})
    assert "Available suites" in str(e.value)


@pytest.mark.parametrize("name, max_vertices", [
    ("coassoc-example", None),
    ("graph-laws", 3),
    ("tree-laws", 3),
    ("lemma21", 3),
])
def test_combinatorial_suites_pass(config, name, max_vertices):
    report = run_suite(name, SuiteOptions(config=config, max_vertices=max_vertices))
    assert report.records
    assert report.passed, report.render_text()


@pytest.mark.parametrize("name", ["lemma31", "eq1", "bar-square", "theorem31", "prop31"])
def test_strict_suites_pass_on_endomorphisms(config, name):
    options = SuiteOptions(config=config, max_vertices=3, instances=["endomorphism-dga"])
    report = run_suite(name, options)
    assert report.records
    assert all(r.shape.startswith("endomorphism-dga: ") for r in report.records)
    assert report.passed, report.render_text()


def test_merkulov_suite(config):
    report = run_suite("merkulov", SuiteOptions(config=config, n=4, instances=["table-properad"]))
    assert [r.shape for r in report.records] == [f"table-properad: line {n}" for n in (2, 3, 4)]
    assert report.passed, report.render_text()
    assert report.parameters["n"] == 4


def test_threads_do_not_change_the_report(config):
    one = run_suite("lemma21", SuiteOptions(config=config, max_vertices=3, threads=1))
    four = run_suite("lemma21", SuiteOptions(config=config, max_vertices=3, threads=4))
    assert [(r.shape, r.passed) for r in one.records] == [(r.shape, r.passed) for r in four.records]


def test_report_serializes(config, tmp_path):
    report = run_suite("coassoc-example", SuiteOptions(config=config, seed=5))
    path = report.write(tmp_path / "report.json")
    data = json.loads(path.read_text())
    assert data["suite"] == "coassoc-example"
    assert data["parameters"] == {"seed": 5}
    assert data["totals"] == {"checks": 3, "passed": 3, "failed": 0}
    text = report.render_text(show_passing=True)
    assert text.startswith("suite coassoc-example: 3/3 checks passed (PASS)")


def test_sh_suites_reach_four_vertices_by_default():
    shipped = load_json(repo_root / "config" / "config.json")
    options = SuiteOptions(config=shipped)
    assert options.bound("max_vertices_sh", 3) == 4
    assert options.bound("max_vertices_strict", 3) == 4
    assert resolve_parameters(shipped, InstanceSpec("transferred-sh"))["bound"] == 4
    assert SuiteOptions(config=shipped, max_vertices=2).bound("max_vertices_sh", 3) == 2


def test_missing_plugins_are_logged_and_skipped(capsys):
    assert import_plugins("suites", ["graph_laws", "no_such_suite"]) == ["no_such_suite"]
    err = capsys.readouterr().err
    assert "WARNING" in err
    assert "suites.no_such_suite" in err
    assert "graph-laws" in SUITE_REGISTRY


def test_map_checks_keeps_item_order():
    records = map_checks(lambda k: [k], range(20), threads=4)
    assert records == list(range(20))


def test_leg_swap_prefers_outputs():
    assert leg_swap(corolla(2, 2)) == ([2, 1], [1, 2])
    assert leg_swap(three_vertex()) == ([1], [2, 1])
    assert leg_swap(line_graph(3)) is None


def main():
    Print("STARTING", "suite functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
