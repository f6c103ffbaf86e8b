#!/usr/bin/env python3
"""
Functional tests for contraction sequences and contraction trees.

Covers:
1. Fixed tree counts on the two- and three-vertex graphs
2. T_G against brute-force sequence enumeration
3. The partner involution on (tree, internal edge) pairs
4. Cutting a tree at an internal edge

Usage:
    python tests/functional_tests/test_trees.py
"""

import sys
from pathlib import Path

import pytest

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print, load_json
from combinatorics.catalog import graphs_up_to
from combinatorics.graphcore import Graph, corolla, graph_from_edges, isomorphic, merge_id
from combinatorics.reference_graphs import chorded_line, diamond, ladder, three_vertex, two_vertex
from combinatorics.trees import (
    ContractionTree, TreeError, enumerate_sequences, enumerate_T, enumerate_That, execute_tree, lemma1_partner,
    realizes, sequence_to_tree, split_at_edge, tree_from_json,
)
from suites.base import SuiteOptions
from suites.tree_laws import partner_check, partner_domain


def test_fixed_counts():
    assert (len(enumerate_T(two_vertex())), len(enumerate_That(two_vertex()))) == (1, 1)
    assert (len(enumerate_T(three_vertex())), len(enumerate_That(three_vertex()))) == (2, 3)


def test_three_vertex_trees():
    T = {t.label() for t in enumerate_T(three_vertex())}
    assert T == {"((v1,v2),v3)", "((v1,v3),v2)"}
    flat = tree_from_json(["v1", "v2", "v3"])
    assert flat in enumerate_That(three_vertex())
    assert not realizes(three_vertex(), tree_from_json([["v2", "v3"], "v1"]), binary=True)


def test_trees_match_sequences():
    for G in (diamond(), chorded_line(), ladder(4), three_vertex()):
        brute = {sequence_to_tree(s) for s in enumerate_sequences(G)}
        assert brute == set(enumerate_T(G))


def test_ladder_has_catalan_many_trees():
    assert [len(enumerate_T(ladder(k))) for k in (2, 3, 4, 5)] == [1, 2, 5, 14]


def test_general_trees_contain_binary_ones():
    for G in graphs_up_to(4, [(1, 1), (2, 1), (1, 2)], min_vertices=2):
        T_hat = enumerate_That(G)
        assert {t for t in T_hat if t.is_binary()} == set(enumerate_T(G))
        for t in T_hat:
            assert realizes(G, t, binary=False)
            assert execute_tree(G, t).size == 1


def test_single_vertex_has_no_tree_set():
    with pytest.raises(TreeError) as e:
        enumerate_T(corolla(1, 1))
    assert e.value.code == "single-vertex"


def test_trees_are_normalized():
    a = tree_from_json([["v3", "v1"], "v2"])
    b = tree_from_json(["v2", ["v1", "v3"]])
    assert a == b
    assert a.to_json() == [["v1", "v3"], "v2"]
    with pytest.raises(TreeError):
        ContractionTree.node([ContractionTree.of_leaf("v1")])


def test_partner_is_a_fixed_point_free_involution():
    for G in (diamond(), chorded_line(), ladder(4)):
        pairs = 0
        for t in enumerate_T(G):
            for e in t.internal_edges():
                t2, e2 = lemma1_partner(G, t, e)
                assert (t2, e2) != (t, e)
                assert lemma1_partner(G, t2, e2) == (t, e)
                assert t.collapse(e) == t2.collapse(e2)
                pairs += 1
        assert pairs % 2 == 0


def test_partner_rejects_leaf_edges():
    G = three_vertex()
    t = enumerate_T(G)[0]
    with pytest.raises(TreeError) as e:
        lemma1_partner(G, t, frozenset(["v3"]))
    assert e.value.code == "not-internal"


def test_split_at_edge():
    G = three_vertex()
    t = tree_from_json([["v1", "v2"], "v3"])
    t_r, t_l, H = split_at_edge(G, t, frozenset(["v1", "v2"]))
    assert t_r == tree_from_json(["v1", "v2"])
    assert t_l.leaves == frozenset([merge_id(["v1", "v2"]), "v3"])
    assert H.vertices == frozenset(["v1", "v2"])
    assert realizes(G.contract_vertices(H.vertices), t_l)


def _in_star() -> Graph:
    return graph_from_edges([("v2", "v1"), ("v3", "v1"), ("v4", "v1")], ["v1"], ["v2", "v3", "v4"])


def _out_star() -> Graph:
    return graph_from_edges([("v1", "v2"), ("v1", "v3"), ("v1", "v4")], ["v2", "v3", "v4"], ["v1"])


def test_partner_domain_reaches_every_vertex_arity():
    options = SuiteOptions(config=load_json(repo_root / "config" / "config.json"))
    domain = partner_domain(options)
    assert max(G.size for G in domain) == 4
    for star in (_in_star(), _out_star()):
        assert any(isomorphic(G, star) for G in domain)
        assert partner_check(star)[0].passed
    assert any(isomorphic(G, diamond()) for G in domain)
    assert all(G.m <= 3 and G.n <= 3 for G in domain)


def main():
    Print("STARTING", "trees functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
