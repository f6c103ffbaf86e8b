"""
lemma22, lemma31 and eq1: the identities the transfer construction rests on.

lemma22 commutes contractions along disjoint thick edges on random
decorated graphs; lemma31 and eq1 evaluate the theta sums on every graph of
the check domain with seeded random decorations.
"""

from itertools import combinations
from typing import List, Tuple

import numpy as np

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from algebra.bimodule import random_element
from algebra.properad import Properad, mu_contract
from algebra.reports import CheckRecord, failed, passed
from algebra.transfer import check_eq1, check_lemma3
from combinatorics.catalog import graphs_up_to
from combinatorics.graphcore import Graph, ThickEdge, graph_to_json, is_admissible, shape_label
from instances.base import BuiltInstance
from suites import register_suite
from suites.base import SuiteOptions, map_checks, per_instance

COMMUTATION = "mu_e mu_e' = mu_e' mu_e for disjoint admissible e, e'"


def commuting_pairs(G: Graph) -> List[Tuple[ThickEdge, ThickEdge]]:
    """Disjoint thick-edge pairs that stay admissible whichever is contracted first."""
    out = []
    for a, b in combinations(G.thick_edges, 2):
        if {a.source, a.target} & {b.source, b.target}:
            continue
        if not (is_admissible(G, a) and is_admissible(G, b)):
            continue
        Ga = G.contract_vertices({a.source, a.target})
        Gb = G.contract_vertices({b.source, b.target})
        if Ga.contract_vertices({b.source, b.target}).is_acyclic() and \
                Gb.contract_vertices({a.source, a.target}).is_acyclic():
            out.append((a, b))
    return out


def commutation_check(P: Properad, G: Graph, pair: Tuple[ThickEdge, ThickEdge], rng: np.random.Generator,
                      seed: int) -> CheckRecord:
    a, b = pair
    x = random_element(P.bimodule, G, rng)
    ea, eb = (a.source, a.target), (b.source, b.target)
    lhs = mu_contract(P, mu_contract(P, x, eb), ea)
    rhs = mu_contract(P, mu_contract(P, x, ea), eb)
    label = f"{shape_label(G)} seed {seed}"
    if lhs == rhs:
        return passed(label, COMMUTATION, f"{len(x)} terms")
    return failed(label, COMMUTATION, {"graph": graph_to_json(G), "element": x.to_json(),
                                       "edges": [list(ea), list(eb)], "seed": seed})


class CommutationSuite:
    name = "lemma22"

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        seeds = int(options.verification("lemma22_seeds", 50))

        def check(built: BuiltInstance) -> List[CheckRecord]:
            P = built.source
            candidates = [(G, pairs) for G in graphs_up_to(options.bound("max_vertices_strict", 4),
                                                           P.check_arities, min_vertices=4)
                          for pairs in [commuting_pairs(G)] if pairs]
            if not candidates:
                return []

            def one(seed: int) -> List[CheckRecord]:
                rng = options.rng(seed)
                G, pairs = candidates[int(rng.integers(len(candidates)))]
                pair = pairs[int(rng.integers(len(pairs)))]
                return [commutation_check(P, G, pair, rng, seed)]

            return map_checks(one, range(seeds), options.threads)

        return per_instance(options, self.name, ["commutative-properad"], check)


class ThetaSuite:
    """lemma31 or eq1 on every graph of the check domain."""

    def __init__(self, name: str, checker):
        self.name = name
        self.checker = checker

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        seeds = int(options.verification("seeds", 10))

        def check(built: BuiltInstance) -> List[CheckRecord]:
            graphs = graphs_up_to(options.bound("max_vertices_strict", 4), built.source.check_arities,
                                  min_vertices=2)
            return map_checks(lambda G: self.checker(built.context, [G], seeds), graphs, options.threads)

        return per_instance(options, self.name, ["endomorphism-dga", "commutative-properad"], check)


@register_suite("lemma22")
class CommutationSuiteFactory:
    @staticmethod
    def create(config: dict) -> CommutationSuite:
        return CommutationSuite()


@register_suite("lemma31")
class LemmaThetaSuiteFactory:
    @staticmethod
    def create(config: dict) -> ThetaSuite:
        return ThetaSuite("lemma31", check_lemma3)


@register_suite("eq1")
class EquationOneSuiteFactory:
    @staticmethod
    def create(config: dict) -> ThetaSuite:
        return ThetaSuite("eq1", check_eq1)
