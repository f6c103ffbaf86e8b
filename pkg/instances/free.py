"""
Truncated free properads without unit.

The basis of biarity (m, n) is every connected graph of at most W vertices
built from the generators, in every leg numbering up to isomorphism. All
elements sit in degree 0 with zero differential; composition grafts the two
graphs into the vertices of the 2-vertex graph and vanishes past weight W.
Sigma acts by renumbering legs.
"""

from fractions import Fraction
from typing import Dict, List

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import Print
from algebra.bimodule import Arity, SigmaBimodule, make_component
from algebra.exactlinalg import GradedMap, GradedSpace, Reduction, identity, zero_map
from algebra.properad import GraftingComposition, Properad
from algebra.transfer import context_from_reductions
from combinatorics.catalog import enumerate_arity_graphs
from combinatorics.graphcore import Graph, canonical_form
from instances import register_instance
from instances.base import BuiltInstance, InstanceError, InstanceSpec, require_int, resolve_parameters

GENERATOR_SETS: Dict[str, List[Arity]] = {
    "binary-cobinary": [(1, 2), (2, 1)],
    "binary": [(1, 2)],
    "cobinary": [(2, 1)],
}
MAX_WEIGHT = 3


def _swap(labels: Dict[str, int], j: int) -> Dict[str, int]:
    flip = {j: j + 1, j + 1: j}
    return {f: flip.get(l, l) for f, l in labels.items()}


def _action(ids: Dict[Graph, str], graphs: Dict[str, Graph], V: GradedSpace, side: str, j: int) -> GradedMap:
    """Permutation matrix of the transposition (j, j+1) of output or input legs."""
    columns = {}
    for name, G in graphs.items():
        if side == "out":
            moved = G.relabeled(_swap(G.out_labels, j), G.in_labels)
        else:
            moved = G.relabeled(G.out_labels, _swap(G.in_labels, j))
        columns[name] = {ids[canonical_form(moved).graph]: Fraction(1)}
    return GradedMap(V, V, 0, columns)


def free_properad(generators: str, weight: int, name: str = "") -> Properad:
    if generators not in GENERATOR_SETS:
        raise InstanceError("spec-invalid", f"Unknown generator set '{generators}'. "
                                            f"Available sets: {', '.join(sorted(GENERATOR_SETS))}")
    gens = GENERATOR_SETS[generators]
    by_arity: Dict[Arity, List[Graph]] = {}
    for k in range(1, weight + 1):
        for G in enumerate_arity_graphs(k, gens, max_multiplicity=2, all_labelings=True):
            by_arity.setdefault((G.m, G.n), []).append(G)

    basis_graphs: Dict[str, Graph] = {}
    components = {}
    for (m, n), graphs in sorted(by_arity.items()):
        named = {f"x{m}{n}_{i + 1}": G for i, G in enumerate(graphs)}
        basis_graphs.update(named)
        ids = {G: x for x, G in named.items()}
        V = GradedSpace(tuple((x, 0) for x in named))
        left = [_action(ids, named, V, "out", j) for j in range(1, m)]
        right = [_action(ids, named, V, "in", j) for j in range(1, n)]
        components[(m, n)] = make_component((m, n), V, None, left, right)

    name = name or f"free-{generators}-w{weight}"
    bm = SigmaBimodule(components, name).validate()
    return Properad(bm, GraftingComposition(basis_graphs, weight), None, name, tuple(gens))


class FreeInstanceBuilder:
    """Builds a truncated free properad; its retract is the identity."""

    def __init__(self, config: dict):
        self.config = config

    def build(self, spec: InstanceSpec) -> BuiltInstance:
        params = resolve_parameters(self.config, spec)
        weight = require_int(params, "weight", 1, MAX_WEIGHT)
        P = free_properad(str(params.get("generators", "binary-cobinary")), weight)

        reductions = {}
        for arity in P.bimodule.arities:
            comp = P.bimodule.component(arity)
            ident = identity(comp.space)
            reductions[arity] = Reduction(comp.space, comp.d, comp.space, comp.d,
                                          ident, ident, zero_map(comp.space, comp.space, -1))
        ctx = context_from_reductions(P, reductions, name=P.name)
        Print("DEBUG", f"Built {P.name}: " + ", ".join(f"{a}: {len(P.bimodule.basis(a))}" for a in P.bimodule.arities))
        notes = {
            "generators": params.get("generators", "binary-cobinary"),
            "weight": weight,
            "dimensions": {f"{m},{n}": len(P.bimodule.basis((m, n))) for (m, n) in P.bimodule.arities},
        }
        return BuiltInstance(spec, P, ctx, notes)


@register_instance("truncated-free-properad")
class FreeInstanceFactory:
    """Factory for truncated free properads."""

    @staticmethod
    def create(config: dict) -> FreeInstanceBuilder:
        return FreeInstanceBuilder(config)
