"""
Endomorphism dga instances.

A finite graded space V carries a pseudo-random differential d. The
properad is End(V) = Hom(V, V), concentrated in biarity (1,1), with the
commutator differential and composition of maps. Its cohomology is
End(H(V)), so every acyclic pair of V gives a nonzero homotopy.

The differential is built as d = P D0 P^-1, where D0 pairs basis elements
of adjacent degrees and P is a unipotent, degree-preserving change of basis
with small integer entries. d squares to zero by construction.
"""

from fractions import Fraction
from typing import Dict, List, Tuple

import numpy as np
import sympy

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import Print
from algebra.bimodule import SigmaBimodule, make_component
from algebra.exactlinalg import (
    GradedMap, GradedSpace, Vec, add_into, cohomology_sdr, format_scalar, from_sympy,
)
from algebra.properad import EndomorphismComposition, Properad
from algebra.transfer import context_from_reductions
from instances import register_instance
from instances.base import BuiltInstance, InstanceError, InstanceSpec, require_int, resolve_parameters

ENDO_ARITY = (1, 1)
MAX_DIMENSION = 6


def random_complex(dimension: int, pairs: int, degree_range: Tuple[int, int], entry_range: int,
                   rng: np.random.Generator) -> Tuple[GradedSpace, GradedMap]:
    """
    A graded space with basis v1..vN in ascending degree and a differential
    with exactly `pairs` acyclic pairs.
    """
    lo, hi = degree_range
    degrees: List[int] = []
    sources: List[int] = []
    for _ in range(pairs):
        k = int(rng.integers(lo, hi))
        sources.append(len(degrees))
        degrees.extend([k, k + 1])
    for _ in range(dimension - 2 * pairs):
        degrees.append(int(rng.integers(lo, hi + 1)))

    # stable sort by degree; remember where each raw slot lands
    order = sorted(range(dimension), key=lambda i: (degrees[i], i))
    position = {raw: pos for pos, raw in enumerate(order)}
    ids = [f"v{p + 1}" for p in range(dimension)]
    V = GradedSpace(tuple((ids[p], degrees[order[p]]) for p in range(dimension)))

    D0 = sympy.zeros(dimension, dimension)
    for s in sources:
        D0[position[s + 1], position[s]] = 1

    P = sympy.eye(dimension)
    for i in range(dimension):
        for j in range(i + 1, dimension):
            if V.basis[i][1] == V.basis[j][1]:
                P[i, j] = int(rng.integers(-entry_range, entry_range + 1))
    D = P * D0 * P.inv()

    columns: Dict[str, Vec] = {}
    for j in range(dimension):
        for i in range(dimension):
            if D[i, j] != 0:
                columns.setdefault(ids[j], {})[ids[i]] = from_sympy(D[i, j])
    return V, GradedMap(V, V, 1, columns)


def endomorphism_space(V: GradedSpace) -> Tuple[GradedSpace, Dict[str, Tuple[str, str]]]:
    """Basis 'b<a' (the map a -> b) of degree |b| - |a|."""
    maps: Dict[str, Tuple[str, str]] = {}
    basis = []
    for b in V.ids:
        for a in V.ids:
            name = f"{b}<{a}"
            maps[name] = (b, a)
            basis.append((name, V.degree(b) - V.degree(a)))
    return GradedSpace(tuple(basis)), maps


def commutator_differential(V: GradedSpace, d: GradedMap, End: GradedSpace,
                            maps: Dict[str, Tuple[str, str]]) -> GradedMap:
    """D(phi) = d phi - (-1)^{|phi|} phi d on the basis maps."""
    ids = {pair: name for name, pair in maps.items()}
    preimages: Dict[str, Vec] = {}
    for x in V.ids:
        for a, c in d.image(x).items():
            preimages.setdefault(a, {})[x] = c
    columns: Dict[str, Vec] = {}
    for name, (b, a) in maps.items():
        col: Vec = {}
        for c, coeff in d.image(b).items():
            add_into(col, {ids[(c, a)]: coeff})
        sign = -1 if End.degree(name) % 2 else 1
        for x, coeff in preimages.get(a, {}).items():
            add_into(col, {ids[(b, x)]: -sign * coeff})
        if col:
            columns[name] = col
    return GradedMap(End, End, 1, columns)


def endomorphism_properad(V: GradedSpace, d: GradedMap, name: str = "endomorphism-dga") -> Properad:
    End, maps = endomorphism_space(V)
    D = commutator_differential(V, d, End, maps)
    bm = SigmaBimodule({ENDO_ARITY: make_component(ENDO_ARITY, End, D)}, name).validate()
    unit = {f"{a}<{a}": Fraction(1) for a in V.ids}
    return Properad(bm, EndomorphismComposition(maps), unit, name, (ENDO_ARITY,))


class EndomorphismInstanceBuilder:
    """Builds End(V) for a seeded random complex V and its retract onto End(H(V))."""

    def __init__(self, config: dict):
        self.config = config

    def build(self, spec: InstanceSpec) -> BuiltInstance:
        params = resolve_parameters(self.config, spec)
        dimension = require_int(params, "dimension", 1, MAX_DIMENSION)
        pairs = require_int(params, "pairs", 0, dimension // 2)
        entry_range = require_int(params, "entry_range", 0, 9)
        degree_range = params.get("degree_range", [-1, 1])
        if not isinstance(degree_range, (list, tuple)) or len(degree_range) != 2:
            raise InstanceError("spec-invalid", "degree_range must be [low, high]")
        lo, hi = int(degree_range[0]), int(degree_range[1])
        if lo > hi or (pairs and lo == hi):
            raise InstanceError("spec-invalid", f"degree_range [{lo}, {hi}] cannot hold an acyclic pair")

        rng = np.random.default_rng(spec.seed)
        V, d = random_complex(dimension, pairs, (lo, hi), entry_range, rng)
        P = endomorphism_properad(V, d, name=f"endomorphism-dga-{spec.seed}")
        reduction = cohomology_sdr(P.bimodule.component(ENDO_ARITY).space,
                                   P.bimodule.component(ENDO_ARITY).d)
        ctx = context_from_reductions(P, {ENDO_ARITY: reduction}, name=P.name)
        Print("DEBUG", f"Built {P.name}: dim V = {dimension}, dim End = {len(reduction.source)}, "
                       f"dim E = {len(reduction.space)}")
        notes = {
            "dimension": dimension,
            "space": [[b, deg] for b, deg in V.basis],
            "differential": [[s, t, format_scalar(v)] for s, t, v in d.entries()],
            "end_dimension": len(reduction.source),
            "target_dimension": len(reduction.space),
            "side_conditions": reduction.side_conditions(),
        }
        return BuiltInstance(spec, P, ctx, notes)


@register_instance("endomorphism-dga")
class EndomorphismInstanceFactory:
    """Factory for endomorphism dga instances."""

    @staticmethod
    def create(config: dict) -> EndomorphismInstanceBuilder:
        return EndomorphismInstanceBuilder(config)
