#!/usr/bin/env python3
"""
Functional tests for dg properads, cocomposition and sh-properads.

Covers:
1. Associativity, derivation and unit laws on builtin instances
2. A non-associative table caught with a witness
3. Contraction along edges and trees
4. The cocomposition example on the three-vertex graph
5. The bar codifferential and the coderivation law

Usage:
    python tests/functional_tests/test_properad.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print
from algebra.bimodule import FreeElement, decoration_tuples, make_bimodule, random_element
from algebra.properad import (
    BarFamily, Properad, PropertyError, bar_differential, check_associativity, check_derivation, check_sh, check_unit,
    coderivation_law_defect, coderivation_square, mu_contract, mu_tree, properad_from_json, strict_as_sh,
)
from combinatorics.graphcore import corolla, line_graph
from combinatorics.reference_graphs import chorded_line
from combinatorics.trees import enumerate_T, tree_from_json
from instances.commutative import commutative_properad
from instances.endomorphism import endomorphism_properad, random_complex
from instances.table import BUILTIN_TABLES, table_properad
from suites.coalgebra import coassociativity_example, point_bimodule

NON_ASSOCIATIVE = {
    "bimodule": {"components": {"1,1": {"basis": [["u", 0], ["v", 0]]}}},
    "properad": {"products": [["u", "u", [["v", "1"]]], ["v", "u", [["v", "1"]]]], "arities": [[1, 1]]},
}


def _massey():
    return table_properad(BUILTIN_TABLES["massey-dga"], "massey-dga")


def _all_passed(records):
    return bool(records) and all(r.passed for r in records)


@pytest.mark.parametrize("table", sorted(BUILTIN_TABLES))
def test_builtin_tables_are_dg_properads(table):
    P = table_properad(BUILTIN_TABLES[table], table)
    assert _all_passed(check_associativity(P))
    assert _all_passed(check_derivation(P))
    if P.unit is None:
        assert check_unit(P) == []
    else:
        assert _all_passed(check_unit(P))


def test_endomorphism_properad_laws():
    V, d = random_complex(3, 1, (-1, 1), 2, np.random.default_rng(5))
    P = endomorphism_properad(V, d)
    assert _all_passed(check_associativity(P, limit=24, rng=np.random.default_rng(0)))
    assert _all_passed(check_derivation(P, limit=24, rng=np.random.default_rng(1)))
    assert _all_passed(check_unit(P))


def test_commutative_properad_laws():
    P = commutative_properad("massey", 2, [(1, 1), (2, 1), (1, 2)])
    assert _all_passed(check_associativity(P, limit=8, rng=np.random.default_rng(0)))
    assert _all_passed(check_derivation(P, limit=8, rng=np.random.default_rng(1)))


def test_non_associative_table_has_a_witness():
    bm = make_bimodule(NON_ASSOCIATIVE["bimodule"])
    P = properad_from_json(NON_ASSOCIATIVE["properad"], bm, "broken")
    records = check_associativity(P)
    assert len(records) == 1 and not records[0].passed
    assert records[0].witness["decorations"] == ["u", "u", "u"]


def test_every_tree_contracts_a_line_to_the_same_product():
    P = _massey()
    G = line_graph(3)
    x = FreeElement.single(P.bimodule, G, ("a", "b", "1"))
    expected = FreeElement.single(P.bimodule, corolla(1, 1), ("c",))
    trees = enumerate_T(G)
    assert len(trees) == 2
    for t in trees:
        assert mu_tree(P, x, t) == expected
    with pytest.raises(PropertyError) as e:
        mu_tree(P, x, tree_from_json([["v1", "v3"], "v2"]))
    assert e.value.code == "invalid-tree"


def test_contracting_along_an_edge():
    P = _massey()
    G = line_graph(2)
    x = FreeElement.single(P.bimodule, G, ("a", "b"))
    assert mu_contract(P, x, ("v2", "v1")) == FreeElement.single(P.bimodule, corolla(1, 1), ("c",))
    assert mu_contract(P, FreeElement.single(P.bimodule, G, ("b", "a")), ("v2", "v1")) == \
        FreeElement.single(P.bimodule, corolla(1, 1), ("c",), coefficient=-1)


def test_inadmissible_edges_are_rejected():
    G = chorded_line()
    bm = point_bimodule(G)
    x = FreeElement.single(bm, G, ("x", "x", "x"))
    for eps in [("v3", "v1"), ("v1", "v2")]:
        with pytest.raises(PropertyError) as e:
            mu_contract(Properad(bm, None), x, eps)
        assert e.value.code == "inadmissible"


def test_coassociativity_example():
    records = coassociativity_example()
    assert len(records) == 3
    assert all(r.passed for r in records)


def test_bar_construction_squares_to_zero():
    P = _massey()
    assert _all_passed(check_sh(strict_as_sh(P, 3), limit=16, rng=np.random.default_rng(2)))
    family = BarFamily(P)
    for seed in range(3):
        x = random_element(P.bimodule, line_graph(3), np.random.default_rng(seed), shift=1)
        assert coderivation_square(family, x).normalized().is_zero()
    with pytest.raises(PropertyError) as e:
        bar_differential(P, FreeElement.single(P.bimodule, line_graph(2), ("a", "b")))
    assert e.value.code == "space-mismatch"


def test_bar_differential_is_a_coderivation():
    P = _massey()
    family = BarFamily(P)
    G = line_graph(3)
    for decs in decoration_tuples(P.bimodule, G, 12, np.random.default_rng(4)):
        assert coderivation_law_defect(family, G, decs) == {}


def main():
    Print("STARTING", "properad functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
