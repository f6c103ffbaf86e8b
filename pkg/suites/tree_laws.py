"""
tree-laws and lemma21: contraction trees against brute force, and the
partner involution on (tree, internal edge) pairs.
"""

from typing import List

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from algebra.reports import CheckRecord, failed, passed
from combinatorics.catalog import graphs_up_to, skeleton_graphs
from combinatorics.graphcore import Graph, graph_to_json, shape_label
from combinatorics.reference_graphs import diamond, three_vertex, two_vertex
from combinatorics.trees import (
    TreeError, enumerate_sequences, enumerate_T, enumerate_That, execute_tree, lemma1_partner, realizes,
    sequence_to_tree,
)
from suites import register_suite
from suites.base import SuiteOptions, map_checks

BRUTE = "T_G = trees of all contraction sequences"
HAT = "T^_G realizable, binary part = T_G, every tree ends in a corolla"
PARTNER = "(t, e) -> (t', e') is a fixed-point-free involution"


def _tree_laws(G: Graph) -> List[CheckRecord]:
    label = shape_label(G)
    T = enumerate_T(G)
    brute = {sequence_to_tree(s) for s in enumerate_sequences(G)}
    records = [passed(label, BRUTE, f"|T_G| = {len(T)}") if brute == set(T)
               else failed(label, BRUTE, {"graph": graph_to_json(G), "T": len(T), "brute_force": len(brute)})]
    T_hat = enumerate_That(G)
    ok = (all(realizes(G, t, binary=False) for t in T_hat)
          and {t for t in T_hat if t.is_binary()} == set(T)
          and all(execute_tree(G, t).size == 1 for t in T_hat))
    records.append(passed(label, HAT, f"|T^_G| = {len(T_hat)}") if ok
                   else failed(label, HAT, {"graph": graph_to_json(G), "T_hat": len(T_hat)}))
    return records


def _fixed_counts() -> List[CheckRecord]:
    records = []
    for G, t_count, hat_count in ((two_vertex(), 1, 1), (three_vertex(), 2, 3)):
        found = (len(enumerate_T(G)), len(enumerate_That(G)))
        identity = f"|T_G| = {t_count}, |T^_G| = {hat_count}"
        records.append(passed(shape_label(G), identity) if found == (t_count, hat_count)
                       else failed(shape_label(G), identity, {"graph": graph_to_json(G), "found": list(found)}))
    G = diamond()
    identity = "|T_G| matches sequence enumeration"
    brute = len({sequence_to_tree(s) for s in enumerate_sequences(G)})
    records.append(passed(shape_label(G), identity, f"|T_G| = {brute}") if brute == len(enumerate_T(G))
                   else failed(shape_label(G), identity, {"graph": graph_to_json(G), "brute_force": brute}))
    return records


def partner_check(G: Graph) -> List[CheckRecord]:
    label = shape_label(G)
    pairs = 0
    for t in enumerate_T(G):
        for e in t.internal_edges():
            try:
                t2, e2 = lemma1_partner(G, t, e)
                back = lemma1_partner(G, t2, e2)
            except TreeError as err:
                return [failed(label, PARTNER, {"graph": graph_to_json(G), "tree": t.to_json(),
                                                "edge": sorted(e), "error": err.code})]
            if (t2, e2) == (t, e) or back != (t, e) or t.collapse(e) != t2.collapse(e2):
                return [failed(label, PARTNER, {"graph": graph_to_json(G), "tree": t.to_json(), "edge": sorted(e)})]
            pairs += 1
    if pairs % 2:
        return [failed(label, PARTNER, {"graph": graph_to_json(G), "pairs": pairs})]
    return [passed(label, PARTNER, f"{pairs} pairs")]


class TreeLawsSuite:
    name = "tree-laws"

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        graphs = graphs_up_to(options.bound("max_vertices_strict", 4), options.arities, min_vertices=2)
        return _fixed_counts() + map_checks(_tree_laws, graphs, options.threads)


def partner_domain(options: SuiteOptions) -> List[Graph]:
    """Every skeleton with at least two vertices up to the strict bound, legs within the guard."""
    return skeleton_graphs(options.bound("max_vertices_strict", 4),
                           int(options.verification("max_edge_multiplicity", 1)), min_vertices=2,
                           max_legs_per_side=int(options.verification("max_legs_per_side", 3)))


class PartnerSuite:
    name = "lemma21"

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        return map_checks(partner_check, partner_domain(options), options.threads)


@register_suite("tree-laws")
class TreeLawsSuiteFactory:
    @staticmethod
    def create(config: dict) -> TreeLawsSuite:
        return TreeLawsSuite()


@register_suite("lemma21")
class PartnerSuiteFactory:
    @staticmethod
    def create(config: dict) -> PartnerSuite:
        return PartnerSuite()
