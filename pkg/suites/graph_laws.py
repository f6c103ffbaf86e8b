"""
graph-laws: structural invariants of graphs, contraction and splitting.

Exhaustive over the check domain (connected graphs over the configured
vertex arities), plus the fixed worked examples: the 12-flag contraction and
admissibility on the chorded diamond.
"""

from itertools import combinations
from typing import List

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from algebra.properad import substitute
from algebra.reports import CheckRecord, failed, passed
from combinatorics.catalog import graphs_up_to
from combinatorics.graphcore import (
    Graph, GraphValidationError, canonical_form, contract_single_edge, enumerate_admissible_subgraphs,
    enumerate_splittings, graph_to_json, is_admissible, isomorphic, merge_id, shape_label, thick_edge_by_ends, validate,
)
from combinatorics.reference_graphs import chorded_diamond, twelve_flag
from suites import register_suite
from suites.base import SuiteOptions, map_checks

CANONICAL = "canon(canon(G)) = canon(G)"
COMMUTE = "(G/e)/e' = (G/e')/e for disjoint admissible e, e'"
REGRAFT = "graft(G/S, S) ~ G for every 2-splitting S"
SUBGRAPHS = "admissible subgraphs are connected with acyclic quotient"


def _worked_examples() -> List[CheckRecord]:
    records = []

    raw, direction, outs, ins = twelve_flag()
    contracted = contract_single_edge(raw, ("g", "h"))
    merged = dict(contracted.blocks).get(merge_id(["v2", "v3"]), ())
    ok = set(merged) == set("efijkl") and "g" not in contracted.flags and "h" not in contracted.flags
    try:
        validate(raw, direction, outs, ins)
        cycle_found = False
    except GraphValidationError as e:
        cycle_found = any(code == "directed-cycle" for code, _ in e.violations)
    label = "12-flag example"
    identity = "contract (gh): block {e,f,i,j,k,l}, loop (kl) rejected"
    records.append(passed(label, identity) if ok and cycle_found
                   else failed(label, identity, {"merged": sorted(merged), "cycle_found": cycle_found}))

    G = chorded_diamond()
    eps1 = is_admissible(G, thick_edge_by_ends(G, "v3", "v4"))
    eps2 = is_admissible(G, thick_edge_by_ends(G, "v1", "v4"))
    count = len(enumerate_admissible_subgraphs(G))
    identity = "v3->v4 admissible, chord v1->v4 not; 11 admissible subgraphs"
    good = eps1 and not eps2 and count == 11
    records.append(passed(shape_label(G), identity) if good
                   else failed(shape_label(G), identity,
                               {"graph": graph_to_json(G), "eps1": eps1, "eps2": eps2, "subgraphs": count}))
    return records


def _laws(G: Graph) -> List[CheckRecord]:
    label = shape_label(G)
    records = []

    canon = canonical_form(G).graph
    records.append(passed(label, CANONICAL) if canonical_form(canon).graph == canon
                   else failed(label, CANONICAL, {"graph": graph_to_json(G)}))

    admissible = [te for te in G.thick_edges if is_admissible(G, te)]
    broken = None
    pairs = 0
    for a, b in combinations(admissible, 2):
        if {a.source, a.target} & {b.source, b.target}:
            continue
        pairs += 1
        ab = G.contract_vertices({a.source, a.target}).contract_vertices({b.source, b.target})
        ba = G.contract_vertices({b.source, b.target}).contract_vertices({a.source, a.target})
        if ab != ba:
            broken = {"graph": graph_to_json(G), "edges": [[a.source, a.target], [b.source, b.target]]}
            break
    records.append(passed(label, COMMUTE, f"{pairs} pairs") if broken is None else failed(label, COMMUTE, broken))

    broken = None
    splittings = enumerate_splittings(G, 2) if G.size >= 2 else []
    for s in splittings:
        inner = {bid: G.induced(block) for bid, block in zip(s.block_ids, s.blocks)}
        if not isomorphic(substitute(s.quotient, inner), G):
            broken = {"graph": graph_to_json(G), "blocks": [list(b) for b in s.blocks]}
            break
    records.append(passed(label, REGRAFT, f"{len(splittings)} splittings") if broken is None
                   else failed(label, REGRAFT, broken))

    bad = [sorted(sub.vertices) for sub in enumerate_admissible_subgraphs(G)
           if len(sub.vertices) > 1 and not (sub.is_connected and sub.is_admissible)]
    records.append(passed(label, SUBGRAPHS) if not bad
                   else failed(label, SUBGRAPHS, {"graph": graph_to_json(G), "subsets": bad}))
    return records


class GraphLawsSuite:
    name = "graph-laws"

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        graphs = graphs_up_to(options.bound("max_vertices_strict", 4), options.arities,
                              int(options.verification("max_edge_multiplicity", 1)))
        return _worked_examples() + map_checks(_laws, graphs, options.threads)


@register_suite("graph-laws")
class GraphLawsSuiteFactory:
    @staticmethod
    def create(config: dict) -> GraphLawsSuite:
        return GraphLawsSuite()
