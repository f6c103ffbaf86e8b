#!/usr/bin/env python3
"""
Functional tests for exact graded linear algebra.

Covers:
1. Scalar parsing and formatting
2. Degree and space checks on graded maps
3. The sign of transporting a map along a desuspension
4. Gaussian-elimination retracts onto cohomology, full and partial

Usage:
    python tests/functional_tests/test_exactlinalg.py
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
from algebra.exactlinalg import (
    GradedMap, GradedSpace, LinalgError, cohomology_sdr, compose, format_scalar, identity, map_from_json,
    parse_scalar, shift_differential, shift_space, shifted_map,
)
from instances.endomorphism import random_complex


def test_scalars_round_trip_through_text():
    assert parse_scalar("3/6") == Fraction(1, 2)
    assert parse_scalar(-4) == Fraction(-4)
    assert format_scalar(Fraction(-2, 4)) == "-1/2"
    assert format_scalar(Fraction(5)) == "5"
    with pytest.raises(LinalgError) as e:
        parse_scalar("one half")
    assert e.value.code == "bad-scalar"
    with pytest.raises(LinalgError):
        parse_scalar(True)


def test_duplicate_basis_ids_are_rejected():
    with pytest.raises(LinalgError) as e:
        GradedSpace((("a", 0), ("a", 1)))
    assert e.value.code == "duplicate-basis"


def test_map_entries_must_respect_degree():
    V = GradedSpace((("a", 0), ("b", 1), ("c", 3)))
    GradedMap.from_entries(V, V, 1, [("a", "b", 2)])
    with pytest.raises(LinalgError) as e:
        GradedMap.from_entries(V, V, 1, [("a", "c", 1)])
    assert e.value.code == "degree-mismatch"


def test_compose_checks_spaces():
    V = GradedSpace((("a", 0),))
    W = GradedSpace((("b", 0),))
    phi = GradedMap.from_entries(V, W, 0, [("a", "b", 3)])
    with pytest.raises(LinalgError) as e:
        compose(phi, phi)
    assert e.value.code == "space-mismatch"
    psi = GradedMap.from_entries(W, V, 0, [("b", "a", "1/3")])
    assert compose(psi, phi) == identity(V)


def test_map_degree_is_inferred_from_json_entries():
    V = GradedSpace((("a", -1), ("b", 0), ("c", 1)))
    phi = map_from_json([["a", "c", "2"]], V, V)
    assert phi.degree == 2
    with pytest.raises(LinalgError):
        map_from_json([["a", "b", "1"], ["a", "c", "1"]], V, V)


def test_shifted_map_negates_odd_maps_only():
    V = GradedSpace((("a", 0), ("b", 1)))
    d = GradedMap.from_entries(V, V, 1, [("a", "b", 1)])
    h = GradedMap.from_entries(V, V, -1, [("b", "a", -1)])
    f = identity(V)
    assert shifted_map(d).entry("a", "b") == -1
    assert shifted_map(h).entry("b", "a") == 1
    assert shifted_map(f) == GradedMap(shift_space(V, 1), shift_space(V, 1), 0, f.columns)
    assert shift_space(V, 1).degree("a") == -1
    assert shift_differential(d).degree == 1


def test_shift_differential_rejects_wrong_degree():
    V = GradedSpace((("a", 0), ("b", 2)))
    with pytest.raises(LinalgError) as e:
        shift_differential(GradedMap.from_entries(V, V, 2, [("a", "b", 1)]))
    assert e.value.code == "not-a-differential"


def test_acyclic_pair_retracts_to_zero():
    V = GradedSpace((("a", 0), ("b", 1), ("x", 0)))
    d = GradedMap.from_entries(V, V, 1, [("a", "b", 2)])
    r = cohomology_sdr(V, d)
    assert r.space.ids == ("[x]",)
    assert r.h.entry("b", "a") == Fraction(-1, 2)
    assert r.homotopy_identity_holds()
    assert r.chain_maps_hold()
    assert r.side_conditions()["gf=Id"]


def test_non_differential_is_rejected():
    V = GradedSpace((("a", 0), ("b", 1), ("c", 2)))
    d = GradedMap.from_entries(V, V, 1, [("a", "b", 1), ("b", "c", 1)])
    with pytest.raises(LinalgError) as e:
        cohomology_sdr(V, d)
    assert e.value.code == "d-not-square-zero"


def test_partial_reduction_keeps_a_differential():
    V = GradedSpace((("a", 0), ("b", 1), ("c", 2), ("e", 3)))
    d = GradedMap.from_entries(V, V, 1, [("a", "b", 1), ("c", "e", 1)])
    r = cohomology_sdr(V, d, max_cancellations=1)
    assert len(r.space) == 2
    assert not r.differential.is_zero()
    assert r.homotopy_identity_holds()
    assert r.chain_maps_hold()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), dimension=st.integers(2, 6), cancellations=st.none() | st.integers(0, 3))
def test_random_complexes_retract_exactly(seed, dimension, cancellations):
    rng = np.random.default_rng(seed)
    pairs = int(rng.integers(0, dimension // 2 + 1))
    V, d = random_complex(dimension, pairs, (-1, 1), 2, rng)
    assert compose(d, d).is_zero()
    r = cohomology_sdr(V, d, cancellations)
    assert r.homotopy_identity_holds()
    assert r.chain_maps_hold()
    cancelled = pairs if cancellations is None else min(pairs, cancellations)
    assert len(r.space) == dimension - 2 * cancelled


def main():
    Print("STARTING", "exactlinalg functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
