"""
Weighted commutative properads.

For a finite graded commutative dga A and a weight bound W the component of
biarity (m, n) is spanned by "w{w}:{a}" for a in A and
max(m, n) - 1 <= w <= W, for every 1 <= m, n <= W + 1. The weight counts
generator vertices, so (2,1) and (1,2) start at weight 1 while (1,1)
starts at weight 0 and holds the unit. Composition multiplies in A, adds
weights and vanishes past W. All Sigma-actions are trivial.
"""

from fractions import Fraction
from typing import Dict, List, Tuple

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import Print
from algebra.bimodule import Arity, SigmaBimodule, make_component, parse_arity
from algebra.exactlinalg import (
    GradedMap, GradedSpace, Vec, cohomology_sdr, map_from_json, parse_scalar, space_from_json,
)
from algebra.properad import CommutativeComposition, Properad
from algebra.transfer import context_from_reductions
from instances import register_instance
from instances.base import BuiltInstance, InstanceError, InstanceSpec, require_int, resolve_parameters
from instances.table import BUILTIN_TABLES

# graded commutative tables usable as coefficient algebras
ALGEBRAS = {"massey": "massey-dga", "idempotent": "idempotent"}
MAX_WEIGHT = 4


def coefficient_algebra(name: str) -> Tuple[GradedSpace, GradedMap, Dict[Tuple[str, str], Vec], Vec]:
    """Basis, differential, product table and unit of a builtin algebra."""
    if name not in ALGEBRAS:
        raise InstanceError("spec-invalid", f"Unknown algebra '{name}'. "
                                            f"Available algebras: {', '.join(sorted(ALGEBRAS))}")
    doc = BUILTIN_TABLES[ALGEBRAS[name]]
    data = doc["bimodule"]["components"]["1,1"]
    A = space_from_json(data["basis"])
    d = map_from_json(data.get("d", []), A, A, degree=1)
    products: Dict[Tuple[str, str], Vec] = {}
    for a, b, value in doc["properad"]["products"]:
        products[(a, b)] = {x: parse_scalar(c) for x, c in value}
    unit = {x: parse_scalar(c) for x, c in doc["properad"].get("unit", [])}
    return A, d, products, unit


def weighted_component(arity: Arity, A: GradedSpace, d: GradedMap, weight: int):
    m, n = arity
    weights = range(max(max(m, n) - 1, 0), weight + 1)
    basis = [(CommutativeComposition.element(w, a), deg) for w in weights for a, deg in A.basis]
    V = GradedSpace(tuple(basis))
    columns = {
        CommutativeComposition.element(w, a): {CommutativeComposition.element(w, b): c for b, c in d.image(a).items()}
        for w in weights for a in A.ids if d.image(a)
    }
    return make_component(arity, V, GradedMap(V, V, 1, columns))


def commutative_properad(algebra: str, weight: int, arities: List[Arity], name: str = "") -> Properad:
    A, d, products, unit = coefficient_algebra(algebra)
    components = {}
    for m in range(1, weight + 2):
        for n in range(1, weight + 2):
            components[(m, n)] = weighted_component((m, n), A, d, weight)
    name = name or f"commutative-{algebra}-w{weight}"
    bm = SigmaBimodule(components, name).validate()
    composition = CommutativeComposition(bm, products, weight)
    unit_vec = {CommutativeComposition.element(0, x): Fraction(c) for x, c in unit.items()} or None
    return Properad(bm, composition, unit_vec, name, tuple(arities))


class CommutativeInstanceBuilder:
    """Builds a weighted commutative properad with componentwise retracts onto cohomology."""

    def __init__(self, config: dict):
        self.config = config

    def build(self, spec: InstanceSpec) -> BuiltInstance:
        params = resolve_parameters(self.config, spec)
        weight = require_int(params, "weight", 1, MAX_WEIGHT)
        try:
            arities = [parse_arity(a) for a in params.get("arities", [[1, 1], [2, 1], [1, 2]])]
        except (TypeError, ValueError) as e:
            raise InstanceError("spec-invalid", f"Malformed arities: {e}") from e
        if any(min(a) < 1 or max(a) > weight + 1 for a in arities):
            raise InstanceError("spec-invalid", f"Arities must lie in 1..{weight + 1} on both sides")
        P = commutative_properad(str(params.get("algebra", "massey")), weight, arities)

        reductions = {}
        for arity in P.bimodule.arities:
            comp = P.bimodule.component(arity)
            reductions[arity] = cohomology_sdr(comp.space, comp.d)
        ctx = context_from_reductions(P, reductions, name=P.name)
        Print("DEBUG", f"Built {P.name}: {len(reductions)} components, "
                       f"total dim {sum(len(r.source) for r in reductions.values())} -> "
                       f"{sum(len(r.space) for r in reductions.values())}")
        notes = {
            "algebra": params.get("algebra", "massey"),
            "weight": weight,
            "dimensions": {f"{m},{n}": [len(r.source), len(r.space)] for (m, n), r in sorted(reductions.items())},
        }
        return BuiltInstance(spec, P, ctx, notes)


@register_instance("commutative-properad")
class CommutativeInstanceFactory:
    """Factory for weighted commutative properads."""

    @staticmethod
    def create(config: dict) -> CommutativeInstanceBuilder:
        return CommutativeInstanceBuilder(config)
