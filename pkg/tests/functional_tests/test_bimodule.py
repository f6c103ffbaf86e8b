#!/usr/bin/env python3
"""
Functional tests for Sigma-bimodules and free elements.

Covers:
1. Koszul signs and the symmetric group actions
2. Bimodule validation errors
3. Decorating graphs in any vertex order
4. Normal forms: renaming invariance and automorphism averaging
5. The induced differential and leg relabeling, including signed actions

Usage:
    python tests/functional_tests/test_bimodule.py
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print
from algebra.bimodule import (
    BimoduleError, FreeElement, decorate, decoration_tuples, flag_permutation, free_differential, koszul_sign,
    make_bimodule, random_element, relabel,
)
from combinatorics.graphcore import corolla, graph_from_edges, line_graph
from combinatorics.reference_graphs import three_vertex


def _odd_pair():
    """(1,1) with a -> b, a in degree 0 and p, r, b in degree 1."""
    return make_bimodule({"components": {"1,1": {
        "basis": [["a", 0], ["b", 1], ["p", 1], ["r", 1]],
        "d": [["a", "b", "1"]],
    }}}, "odd-pair")


def _swapping():
    """x and y swapped by the input transposition of (1,2); z spans (2,1)."""
    return make_bimodule({"components": {
        "1,2": {"basis": [["x", 0], ["y", 0]], "right": [[["x", "y", "1"], ["y", "x", "1"]]]},
        "2,1": {"basis": [["z", 0]]},
    }}, "swapping")


def test_koszul_sign_counts_odd_crossings():
    assert koszul_sign([1, 1], [1, 0]) == -1
    assert koszul_sign([1, 0], [1, 0]) == 1
    assert koszul_sign([1, 1, 1], [2, 1, 0]) == -1
    assert koszul_sign([2, 1, 3], [2, 0, 1]) == -1
    assert flag_permutation(["a", "b"], ["b", "a"]) == [1, 0]


def test_component_action_swaps_inputs():
    bm = _swapping()
    comp = bm.component((1, 2))
    assert not comp.trivial_actions
    assert comp.act({"x": Fraction(1)}, [0], [1, 0]) == {"y": Fraction(1)}
    assert comp.act({"x": Fraction(1)}, [0], [0, 1]) == {"x": Fraction(1)}
    assert bm.component((2, 1)).trivial_actions


def test_validation_errors():
    with pytest.raises(BimoduleError) as e:
        make_bimodule({"components": {"1,1": {
            "basis": [["a", 0], ["b", 1], ["c", 2]], "d": [["a", "b", "1"], ["b", "c", "1"]],
        }}})
    assert e.value.code == "d-not-square-zero"

    with pytest.raises(BimoduleError) as e:
        make_bimodule({"components": {"2,1": {
            "basis": [["x", 0]], "left": [[["x", "x", "2"]]],
        }}})
    assert e.value.code == "action-relation-violated"

    with pytest.raises(BimoduleError) as e:
        make_bimodule({"components": {"2,1": {
            "basis": [["x", 0], ["y", 0], ["w", 1]],
            "d": [["x", "w", "1"]],
            "left": [[["x", "y", "1"], ["y", "x", "1"], ["w", "w", "1"]]],
        }}})
    assert e.value.code == "d-not-equivariant"

    with pytest.raises(BimoduleError) as e:
        _odd_pair().component((2, 2))
    assert e.value.code == "arity-mismatch"


def test_decorate_sorts_with_koszul_sign():
    bm = _odd_pair()
    G = line_graph(2)
    dg = decorate(bm, G, [("v2", "p"), ("v1", "r")])
    assert dg.decorations == ("r", "p")
    assert dg.coefficient == -1
    assert decorate(bm, G, [("v2", "p"), ("v1", "r")], shift=1).coefficient == 1
    assert decorate(bm, G, [("v2", "a"), ("v1", "r")]).coefficient == 1

    with pytest.raises(BimoduleError) as e:
        decorate(bm, G, [("v1", "zz"), ("v2", "a")])
    assert e.value.code == "arity-mismatch"
    with pytest.raises(BimoduleError) as e:
        decorate(bm, G, [("v1", "a")])
    assert e.value.code == "bad-assignment"


def test_equality_ignores_vertex_names():
    bm = _odd_pair()
    G = line_graph(2)
    H = G.renamed({}, {"v1": "v2", "v2": "v1"})
    x = FreeElement.of(bm, decorate(bm, G, [("v1", "p"), ("v2", "r")]))
    y = FreeElement.of(bm, decorate(bm, H, [("v2", "p"), ("v1", "r")]))
    assert x == y
    assert x != x.scaled(-1)
    assert (x - y).normalized().is_zero()


def test_normal_form_averages_over_automorphisms():
    bm = _swapping()
    G = graph_from_edges([("v2", "v1"), ("v2", "v1")], out_legs=["v1"], in_legs=["v2"])
    x = FreeElement.single(bm, G, ("x", "z"))
    y = FreeElement.single(bm, G, ("y", "z"))
    assert x == y
    normal = x.normalized()
    assert normal.normal
    assert len(normal) == 2
    assert all(c == Fraction(1, 2) for _, c in normal.items())


def test_elements_over_different_shifts_do_not_mix():
    bm = _odd_pair()
    x = FreeElement.single(bm, corolla(1, 1), ("a",))
    y = FreeElement.single(bm, corolla(1, 1), ("a",), shift=1)
    assert x != y
    with pytest.raises(BimoduleError) as e:
        x + y
    assert e.value.code == "space-mismatch"


def test_free_differential_signs():
    bm = _odd_pair()
    G = line_graph(2)
    x = FreeElement.single(bm, G, ("a", "a"))
    assert free_differential(x).terms == {(G, ("b", "a")): 1, (G, ("a", "b")): 1}
    shifted = FreeElement.single(bm, G, ("a", "a"), shift=1)
    assert free_differential(shifted).terms == {(G, ("b", "a")): -1, (G, ("a", "b")): 1}
    assert free_differential(FreeElement.single(bm, G, ("b", "a"))).terms == {(G, ("b", "b")): -1}


def test_free_differential_squares_to_zero():
    bm = make_bimodule({"components": {a: {"basis": [["a", 0], ["b", 1]], "d": [["a", "b", "1"]]}
                                       for a in ("1,1", "1,2")}})
    G = three_vertex()
    for seed in range(5):
        for shift in (0, 1):
            x = random_element(bm, G, np.random.default_rng(seed), shift=shift)
            assert free_differential(free_differential(x)).normalized().is_zero()


def test_relabel_commutes_with_the_differential():
    bm = make_bimodule({"components": {a: {"basis": [["a", 0], ["b", 1]], "d": [["a", "b", "1"]]}
                                       for a in ("1,1", "1,2")}})
    G = three_vertex()
    x = random_element(bm, G, np.random.default_rng(3), shift=1)
    assert free_differential(relabel(x, [1], [2, 1])) == relabel(free_differential(x), [1], [2, 1])
    assert relabel(relabel(x, [1], [2, 1]), [1], [2, 1]) == x
    with pytest.raises(BimoduleError) as e:
        relabel(FreeElement.single(bm, G, ("a", "b", "a"), shift=1), [1, 2], [1, 2])
    assert e.value.code == "size-mismatch"


def _signed():
    """
    Actions that are not permutations of the basis: the transposition sends
    x to -y, fixes u, sends v to u - v and negates t, z and o.
    """
    return make_bimodule({"components": {
        "1,1": {"basis": [["a", 0], ["b", 1]], "d": [["a", "b", "1"]]},
        "1,2": {
            "basis": [["x", 0], ["y", 0], ["p", 1], ["q", 1], ["t", 1], ["u", 0], ["v", 0]],
            "d": [["x", "p", "1"], ["y", "q", "1"]],
            "right": [[["x", "y", "-1"], ["y", "x", "-1"], ["p", "q", "-1"], ["q", "p", "-1"], ["t", "t", "-1"],
                       ["u", "u", "1"], ["v", "u", "1"], ["v", "v", "-1"]]],
        },
        "2,1": {
            "basis": [["z", 0], ["o", 1]],
            "d": [["z", "o", "1"]],
            "left": [[["z", "z", "-1"], ["o", "o", "-1"]]],
        },
    }}, "signed")


SIGNED_GRAPHS = [
    corolla(1, 2),
    corolla(2, 1),
    three_vertex(),
    graph_from_edges([("v1", "v2"), ("v1", "v3")], out_legs=["v2", "v3"], in_legs=["v1"]),
    graph_from_edges([("v2", "v1")], out_legs=["v1", "v2"], in_legs=["v1", "v2"]),
    graph_from_edges([("v2", "v1"), ("v2", "v1")], out_legs=["v1"], in_legs=["v2"]),
]


def test_relabeling_a_corolla_is_the_action():
    bm = _signed()
    comp = bm.component((1, 2))
    G = corolla(1, 2)
    for e in comp.space.ids:
        moved = relabel(FreeElement.single(bm, G, (e,)), [1], [2, 1])
        image = comp.act({e: Fraction(1)}, [0], [1, 0])
        expected = FreeElement(bm, {(G, (e2,)): c for e2, c in image.items()})
        assert moved == expected, e
    assert relabel(FreeElement.single(bm, G, ("v",)), [1], [2, 1]) == \
        FreeElement(bm, {(G, ("u",)): Fraction(1), (G, ("v",)): Fraction(-1)})
    H = corolla(2, 1)
    assert relabel(FreeElement.single(bm, H, ("z",)), [2, 1], [1]) == FreeElement.single(bm, H, ("z",)).scaled(-1)


@settings(max_examples=40, deadline=None)
@given(data=st.data(), seed=st.integers(0, 10_000), shift=st.sampled_from([0, 1]),
       index=st.integers(0, len(SIGNED_GRAPHS) - 1))
def test_signed_actions_commute_with_the_differential(data, seed, shift, index):
    bm = _signed()
    G = SIGNED_GRAPHS[index]
    sigma_out = data.draw(st.permutations(list(range(1, G.m + 1))))
    sigma_in = data.draw(st.permutations(list(range(1, G.n + 1))))
    x = random_element(bm, G, np.random.default_rng(seed), shift=shift)
    moved = relabel(x, sigma_out, sigma_in)
    assert free_differential(moved) == relabel(free_differential(x), sigma_out, sigma_in)
    assert free_differential(free_differential(moved)).normalized().is_zero()


def test_decoration_tuples_sample_above_the_limit():
    bm = _odd_pair()
    G = line_graph(2)
    assert len(decoration_tuples(bm, G)) == 16
    sample = decoration_tuples(bm, G, limit=5, rng=np.random.default_rng(7))
    assert len(sample) == len(set(sample)) == 5
    assert sample == decoration_tuples(bm, G, limit=5, rng=np.random.default_rng(7))
    assert decoration_tuples(bm, three_vertex()) == []


def main():
    Print("STARTING", "bimodule functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
