#!/usr/bin/env python3
"""
Functional tests for directed flag graphs and the graph catalog.

Covers:
1. Validation with the full list of violated invariants
2. The 12-flag contraction example and admissibility on the chorded diamond
3. Canonical forms, automorphisms and grafting
4. Splittings and exhaustive generation

Usage:
    python tests/functional_tests/test_graphcore.py
"""

import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print
from combinatorics.catalog import CatalogError, dump_catalog, enumerate_arity_graphs, enumerate_graphs
from combinatorics.graphcore import (
    IN, OUT, GraphError, GraphValidationError, RawGraph, automorphisms, canonical_form, contract_single_edge,
    contract_thick_edge, corolla, enumerate_admissible_subgraphs, enumerate_splittings, graft, graph_from_edges,
    graph_from_json, graph_to_json, is_admissible, isomorphic, line_graph, merge_id, thick_edge_by_ends, validate,
)
from combinatorics.reference_graphs import chorded_diamond, diamond, three_vertex, twelve_flag


def _codes(error: GraphValidationError):
    return [code for code, _ in error.violations]


def test_twelve_flag_contraction_merges_blocks():
    raw, _, _, _ = twelve_flag()
    contracted = contract_single_edge(raw, ("g", "h"))
    blocks = dict(contracted.blocks)
    merged = merge_id(["v2", "v3"])
    assert set(blocks[merged]) == set("efijkl")
    assert "g" not in contracted.flags and "h" not in contracted.flags
    assert ("g", "h") not in contracted.pairs
    assert blocks["v1"] == tuple("abcd")


def test_twelve_flag_loop_is_a_directed_cycle():
    raw, direction, outs, ins = twelve_flag()
    with pytest.raises(GraphValidationError) as e:
        validate(raw, direction, outs, ins)
    assert "directed-cycle" in _codes(e.value)


def test_contracting_a_non_edge_fails():
    raw, _, _, _ = twelve_flag()
    with pytest.raises(GraphError) as e:
        contract_single_edge(raw, ("a", "j"))
    assert e.value.code == "not-an-edge"


def test_validation_reports_every_violation():
    raw = RawGraph(flags=("a", "b"), pairs=(("a", "b"),), blocks=(("v1", ("a",)), ("v2", ("b",))))
    with pytest.raises(GraphValidationError) as e:
        validate(raw, {"a": OUT, "b": OUT}, {}, {})
    assert "direction-inconsistent-on-edge" in _codes(e.value)

    raw = RawGraph(flags=("a", "b"), pairs=(), blocks=(("v1", ("a",)), ("v2", ("b",))))
    with pytest.raises(GraphValidationError) as e:
        validate(raw, {"a": OUT, "b": IN}, {"a": 1}, {"b": 1})
    assert _codes(e.value) == ["disconnected"]

    raw = RawGraph(flags=("a", "b"), pairs=(), blocks=(("v1", ("a", "b")), ("v2", ("b",))))
    with pytest.raises(GraphValidationError) as e:
        validate(raw, {"a": OUT, "b": IN}, {"a": 1}, {"b": 1})
    assert "partition-overlap" in _codes(e.value)

    raw = RawGraph(flags=("a", "b"), pairs=(), blocks=(("v1", ("a", "b")),))
    with pytest.raises(GraphValidationError) as e:
        validate(raw, {"a": OUT, "b": IN}, {"a": 2}, {"b": 1})
    assert _codes(e.value) == ["bad-labeling"]


def test_chorded_diamond_admissibility():
    G = chorded_diamond()
    assert is_admissible(G, thick_edge_by_ends(G, "v3", "v4"))
    assert not is_admissible(G, thick_edge_by_ends(G, "v1", "v4"))
    assert len(enumerate_admissible_subgraphs(G)) == 11
    assert not contract_thick_edge(G, thick_edge_by_ends(G, "v1", "v4")).is_acyclic()


def test_merge_ids_are_natural_and_flat():
    assert merge_id(["v10", "v2"]) == "v2+v10"
    assert merge_id(["v3", merge_id(["v2", "v1"])]) == "v1+v2+v3"


def test_json_round_trip():
    for G in (diamond(), three_vertex(), corolla(2, 3)):
        assert graph_from_json(graph_to_json(G)) == G


def test_canonical_form_forgets_names():
    G = diamond()
    renamed = G.renamed({f: f + "x" for f in G.flags}, {"v1": "v4", "v4": "v1", "v2": "v3", "v3": "v2"})
    assert renamed != G
    assert isomorphic(G, renamed)
    canon = canonical_form(G).graph
    assert canonical_form(canon).graph == canon


def test_leg_labels_matter_up_to_automorphism():
    G = three_vertex()
    swapped = G.relabeled(G.out_labels, {f: 3 - l for f, l in G.in_labels.items()})
    assert isomorphic(G, swapped)
    H = graph_from_edges([("v2", "v1")], out_legs=["v1", "v2"], in_legs=["v2"])
    flipped = H.relabeled({f: 3 - l for f, l in H.out_labels.items()}, H.in_labels)
    assert not isomorphic(H, flipped)


def test_parallel_edges_give_automorphisms():
    G = graph_from_edges([("v2", "v1"), ("v2", "v1")], out_legs=["v1"], in_legs=["v2"])
    assert len(automorphisms(G)) == 2
    assert len(automorphisms(three_vertex())) == 1


@settings(max_examples=30, deadline=None)
@given(st.permutations(["v1", "v2", "v3", "v4"]))
def test_canonical_form_is_invariant_under_vertex_renaming(names):
    G = chorded_diamond()
    renamed = G.renamed({}, dict(zip(G.vertices, names)))
    assert canonical_form(renamed).graph == canonical_form(G).graph


def test_graft_two_corollas_is_a_line():
    G = graft(corolla(1, 1, "a"), corolla(1, 1, "b"), [(1, 1)])
    assert isomorphic(G, line_graph(2))
    with pytest.raises(GraphError) as e:
        graft(corolla(1, 1, "a"), corolla(1, 1, "b"), [(2, 1)])
    assert e.value.code == "leg-reuse"
    with pytest.raises(GraphError) as e:
        graft(corolla(1, 1, "a"), corolla(1, 1, "b"), [])
    assert e.value.code == "disconnected-result"


def test_splittings_of_the_three_vertex_graph():
    G = three_vertex()
    two = enumerate_splittings(G, 2)
    assert sorted(s.blocks for s in two) == [(("v1", "v2"), ("v3",)), (("v1", "v3"), ("v2",))]
    assert all(s.quotient.size == 2 for s in two)
    assert len(enumerate_splittings(G, 3)) == 1
    with pytest.raises(GraphError) as e:
        enumerate_splittings(G, 4)
    assert e.value.code == "k-out-of-range"


def test_arity_graphs():
    assert len(enumerate_arity_graphs(1, [(1, 1), (2, 1)])) == 2
    lines = enumerate_arity_graphs(2, [(1, 1)])
    assert len(lines) == 1 and isomorphic(lines[0], line_graph(2))
    for G in enumerate_arity_graphs(3, [(1, 1), (2, 1), (1, 2)]):
        assert G.is_connected() and G.is_acyclic()
        assert all(G.arity(v) in [(1, 1), (2, 1), (1, 2)] for v in G.vertices)


def test_catalog_reports_tree_counts():
    entries = dump_catalog(3, 1, 2)
    codes = [canonical_form(graph_from_json(e["graph"])).code for e in entries]
    assert len(codes) == len(set(codes))
    target = canonical_form(three_vertex()).graph
    found = [e for e in entries if canonical_form(graph_from_json(e["graph"])).graph == target]
    assert len(found) == 1
    assert (found[0]["T"], found[0]["T_hat"]) == (2, 3)


def test_catalog_guards():
    with pytest.raises(CatalogError) as e:
        dump_catalog(6, 1, 1)
    assert e.value.code == "bound-too-large"
    with pytest.raises(CatalogError):
        enumerate_graphs(3, 5, 1)
    with pytest.raises(CatalogError):
        enumerate_graphs(5, 4, 4, max_work=10)


def main():
    Print("STARTING", "graphcore functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
