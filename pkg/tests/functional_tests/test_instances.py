#!/usr/bin/env python3
"""
Functional tests for the instance builders.

Covers:
1. Seeded builds serialize identically
2. Parameter validation (spec-invalid)
3. The builder registry
4. Table documents loaded from disk
5. The two-stage sh instance

Usage:
    python tests/functional_tests/test_instances.py
"""

import json
import sys
from pathlib import Path

import pytest

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print, load_json
from instances import INSTANCE_REGISTRY, build_instance, get_instance_builder
from instances.base import InstanceError, InstanceSpec, require_int, resolve_parameters
from instances.table import BUILTIN_TABLES

CONFIG = load_json(repo_root / "config" / "config.json")
ENDO = {"dimension": 4, "pairs": 1, "degree_range": [-1, 1], "entry_range": 2}


def _dump(built) -> str:
    return json.dumps(built.to_json(), sort_keys=True)


def test_registry_lists_every_kind():
    assert set(INSTANCE_REGISTRY) == {"endomorphism-dga", "table-properad", "commutative-properad",
                                      "truncated-free-properad", "transferred-sh"}
    with pytest.raises(ValueError) as e:
        get_instance_builder("klein-bottle", CONFIG)
    assert "Available kinds" in str(e.value)


def test_seeded_builds_are_reproducible():
    a = build_instance(InstanceSpec("endomorphism-dga", ENDO, seed=11))
    b = build_instance(InstanceSpec("endomorphism-dga", ENDO, seed=11))
    assert _dump(a) == _dump(b)
    assert a.strict
    assert a.notes["end_dimension"] == 16
    assert a.notes["target_dimension"] == 4


def test_config_defaults_fill_missing_parameters():
    spec = InstanceSpec("endomorphism-dga", {"dimension": 3})
    params = resolve_parameters(CONFIG, spec)
    assert params["dimension"] == 3 and params["pairs"] == 1
    built = build_instance(spec, CONFIG)
    assert built.notes["dimension"] == 3


@pytest.mark.parametrize("kind, parameters", [
    ("endomorphism-dga", {"dimension": 9, "pairs": 1, "entry_range": 2}),
    ("endomorphism-dga", {"dimension": 4, "pairs": 3, "entry_range": 2}),
    ("endomorphism-dga", {"dimension": 4, "pairs": 1, "entry_range": 2, "degree_range": [0, 0]}),
    ("endomorphism-dga", {"dimension": "four", "pairs": 1, "entry_range": 2}),
    ("table-properad", {"table": "octonions"}),
    ("commutative-properad", {"algebra": "massey", "weight": 9}),
    ("commutative-properad", {"algebra": "massey", "weight": 1, "arities": [[3, 1]]}),
    ("commutative-properad", {"algebra": "tensor", "weight": 2}),
    ("transferred-sh", {"base": "transferred-sh", "cancellations": 1, "bound": 3}),
])
def test_bad_parameters_are_spec_invalid(kind, parameters):
    with pytest.raises(InstanceError) as e:
        build_instance(InstanceSpec(kind, parameters))
    assert e.value.code == "spec-invalid"


def test_require_int_rejects_booleans():
    with pytest.raises(InstanceError):
        require_int({"n": True}, "n", 0, 3)
    with pytest.raises(InstanceError):
        require_int({}, "n", 0, 3)
    assert require_int({"n": 2}, "n", 0, 3) == 2


def test_spec_round_trip_needs_a_kind():
    spec = InstanceSpec("table-properad", {"table": "idempotent"}, seed=4)
    assert InstanceSpec.from_json(spec.to_json()) == spec
    with pytest.raises(InstanceError):
        InstanceSpec.from_json({"seed": 1})


def test_table_documents_are_checked_on_load(tmp_path):
    broken = {
        "bimodule": {"components": {"1,1": {"basis": [["u", 0], ["v", 0]]}}},
        "properad": {"products": [["u", "u", [["v", "1"]]], ["v", "u", [["v", "1"]]]], "arities": [[1, 1]]},
    }
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(broken))
    with pytest.raises(InstanceError) as e:
        build_instance(InstanceSpec("table-properad", {"path": str(path)}))
    assert e.value.code == "spec-invalid"

    good = tmp_path / "idempotent.json"
    good.write_text(json.dumps(BUILTIN_TABLES["idempotent"]))
    built = build_instance(InstanceSpec("table-properad", {"path": str(good)}))
    assert built.context.name == "idempotent"
    assert built.notes["dimensions"] == {"1,1": [1, 1]}


def test_free_properad_builds():
    built = build_instance(InstanceSpec("truncated-free-properad"), CONFIG)
    assert built.strict
    assert built.context.target.arities == built.source.bimodule.arities


def test_two_stage_sh_instance():
    params = {"base": "endomorphism-dga", "cancellations": 1, "bound": 3,
              "base_parameters": {"dimension": 3, "pairs": 1, "degree_range": [-1, 1], "entry_range": 1}}
    built = build_instance(InstanceSpec("transferred-sh", params, seed=2), CONFIG)
    assert not built.strict
    assert built.source.bound == 3
    assert not built.context.strict
    again = build_instance(InstanceSpec("transferred-sh", params, seed=2), CONFIG)
    assert _dump(built) == _dump(again)


def main():
    Print("STARTING", "instance functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
