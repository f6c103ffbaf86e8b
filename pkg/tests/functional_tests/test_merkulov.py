#!/usr/bin/env python3
"""
Functional tests for the classical A-infinity recursion.

The graph engine restricted to line graphs must agree with the recursion
on every dg algebra instance.

Usage:
    python tests/functional_tests/test_merkulov.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print
from algebra.bimodule import decoration_tuples
from algebra.merkulov import MerkulovOracle, OracleError, merkulov_oracle
from algebra.transfer import TransferEngine
from combinatorics.graphcore import line_graph
from instances import build_instance
from instances.base import InstanceSpec

ENDO = {"dimension": 4, "pairs": 1, "degree_range": [-1, 1], "entry_range": 2}


@pytest.fixture(scope="module")
def massey():
    return build_instance(InstanceSpec("table-properad", {"table": "massey-dga"}))


@pytest.mark.parametrize("seed", [0, 7])
def test_line_graphs_match_the_recursion_on_endomorphisms(seed):
    ctx = build_instance(InstanceSpec("endomorphism-dga", ENDO, seed=seed)).context
    oracle = MerkulovOracle(ctx)
    engine = TransferEngine(ctx)
    for n in range(2, 5):
        line = line_graph(n)
        for xs in decoration_tuples(ctx.target, line, 24, np.random.default_rng(n)):
            assert engine.partial_G(line, xs) == oracle.m(xs)


def test_line_graphs_match_the_recursion_on_massey(massey):
    ctx = massey.context
    oracle = MerkulovOracle(ctx)
    engine = TransferEngine(ctx)
    for n in range(2, 6):
        line = line_graph(n)
        for xs in decoration_tuples(ctx.target, line, 32, np.random.default_rng(n)):
            assert engine.partial_G(line, xs) == oracle.m(xs)


def test_massey_has_a_nonzero_triple_product(massey):
    table = merkulov_oracle(massey.context, 3)
    assert table
    engine = TransferEngine(massey.context)
    for xs, value in table.items():
        assert engine.partial_G(line_graph(3), xs) == value


def test_oracle_only_covers_algebras(massey):
    built = build_instance(InstanceSpec("commutative-properad",
                                        {"algebra": "massey", "weight": 1, "arities": [[1, 1], [2, 1]]}))
    with pytest.raises(OracleError) as e:
        MerkulovOracle(built.context)
    assert e.value.code == "not-an-algebra-case"
    with pytest.raises(OracleError):
        merkulov_oracle(massey.context, 1)
    with pytest.raises(OracleError):
        MerkulovOracle(massey.context).m(massey.context.target.basis((1, 1))[:1])


def main():
    Print("STARTING", "merkulov functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
