#!/usr/bin/env python3
"""
Functional tests for the transfer engine.

Covers:
1. Validation of retract data
2. The theta identities on strict sources
3. The transferred codifferential and the morphism back to the source
4. Corollas, levels of F and exported tables

Usage:
    python tests/functional_tests/test_transfer.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print
from algebra.bimodule import FreeElement
from algebra.exactlinalg import GradedMap
from algebra.transfer import (
    TransferContext, TransferEngine, TransferError, check_codifferential, check_eq1, check_lemma3, check_morphism,
    transferred_coderivation,
)
from combinatorics.catalog import graphs_up_to
from combinatorics.graphcore import GraphError, corolla, line_graph
from combinatorics.trees import enumerate_T, tree_from_json
from instances import build_instance
from instances.base import InstanceSpec

ENDO = {"dimension": 4, "pairs": 1, "degree_range": [-1, 1], "entry_range": 2}
ALGEBRA = [(1, 1)]


@pytest.fixture(scope="module")
def endo():
    return build_instance(InstanceSpec("endomorphism-dga", ENDO, seed=3))


@pytest.fixture(scope="module")
def commutative():
    return build_instance(InstanceSpec("commutative-properad",
                                       {"algebra": "massey", "weight": 1, "arities": [[1, 1], [2, 1], [1, 2]]}))


def _all_passed(records):
    return bool(records) and all(r.passed for r in records)


def test_context_validation(endo):
    ctx = endo.context
    assert ctx.strict
    with pytest.raises(TransferError) as e:
        TransferContext(ctx.source, ctx.target, ctx.f, ctx.g, {}).validate()
    assert e.value.code == "space-mismatch"

    space = ctx.source_bimodule.component((1, 1)).space
    zero_h = {(1, 1): GradedMap(space, space, -1, {})}
    with pytest.raises(TransferError) as e:
        TransferContext(ctx.source, ctx.target, ctx.f, ctx.g, zero_h).validate()
    assert e.value.code == "homotopy-identity-violated"


def test_theta_identities_on_lines(endo):
    graphs = graphs_up_to(3, ALGEBRA, min_vertices=2)
    assert _all_passed(check_lemma3(endo.context, graphs, seeds=3))
    assert _all_passed(check_eq1(endo.context, graphs, seeds=3))


def test_theta_identities_on_mixed_arities(commutative):
    graphs = graphs_up_to(3, commutative.source.check_arities, min_vertices=3)
    assert _all_passed(check_lemma3(commutative.context, graphs, seeds=2))
    assert _all_passed(check_eq1(commutative.context, graphs, seeds=2))


def test_theta_rejects_bad_input(endo):
    engine = TransferEngine(endo.context)
    G = line_graph(3)
    decs = (endo.context.source_bimodule.basis((1, 1))[0],) * 3
    with pytest.raises(TransferError) as e:
        engine.theta_t(G, decs, tree_from_json([["v1", "v3"], "v2"]))
    assert e.value.code == "invalid-tree"
    t = enumerate_T(G)[0]
    with pytest.raises(TransferError) as e:
        engine.theta_variant(G, decs, t, t.internal_edges()[0], "half")
    assert e.value.code == "bad-variant"


def test_transferred_structure_is_a_codifferential(endo):
    result = transferred_coderivation(endo.context, 3, ALGEBRA)
    graphs = graphs_up_to(3, ALGEBRA)
    assert _all_passed(check_codifferential(result, graphs, limit=16, rng=np.random.default_rng(0)))
    assert _all_passed(check_morphism(result, graphs, limit=16, rng=np.random.default_rng(1)))


def test_corollas_carry_the_reduced_differential(endo):
    ctx = endo.context
    engine = TransferEngine(ctx)
    d_hat = ctx.target.component((1, 1)).differential(1)
    for x in ctx.target.basis((1, 1)):
        assert engine.partial_G(corolla(1, 1), (x,)) == d_hat.image(x)
        level_one = engine.F_apply(corolla(1, 1), (x,), 1)
        expected = {(corolla(1, 1), (y,)): c for y, c in ctx.f_hat[(1, 1)].image(x).items()}
        assert level_one == FreeElement(ctx.source_bimodule, expected, shift=1)
    with pytest.raises(GraphError) as e:
        engine.F_apply(line_graph(2), (ctx.target.basis((1, 1))[0],) * 2, 3)
    assert e.value.code == "k-out-of-range"


def test_sh_result_exports_its_table(endo):
    result = transferred_coderivation(endo.context, 3, ALGEBRA)
    S = result.as_sh_properad()
    assert S.bound == 3 and S.bimodule is endo.context.target
    rows = result.table(graphs_up_to(2, ALGEBRA), limit=16)
    assert all(row["value"] for row in rows)
    assert all(len(row["decorations"]) == len(row["graph"]["vertices"]) for row in rows)


def main():
    Print("STARTING", "transfer functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
