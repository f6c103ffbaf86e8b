"""
Sigma-bimodules and the free construction on them.

A Sigma-bimodule is a finite table of chain complexes E(m,n) carrying
commuting actions of the symmetric groups on the m outputs and n inputs.
The actions are given by the matrices of the adjacent transpositions
s_1..s_{m-1} and s_1..s_{n-1}.

A decorated graph puts one basis element of E(out(v), in(v)) on each vertex
v. The decoration is read relative to the vertex's flags in natural order:
output position i is the i-th out-flag of v and input position j the j-th
in-flag. Decorations are listed in the natural order of the vertex ids,
and every reordering of the factors carries its Koszul sign in the term
coefficient.

Elements of the free construction are FreeElements: finite sums of
(graph, decorations) keys with Fraction coefficients. Presentation-level
keys are exact and cheap; normalized() moves every term to the canonical
presentation of its graph and averages over the automorphisms of that
graph, after which equality is plain dictionary equality.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import DomainError
from algebra.exactlinalg import (
    GradedMap, GradedSpace, Vec, add_into, compose, format_scalar, identity,
    map_from_json, map_to_json, shifted_map, space_from_json, space_to_json,
    square_zero_witness,
)
from combinatorics.graphcore import Graph, automorphisms, canonical_form, graph_to_json

Arity = Tuple[int, int]
Key = Tuple[Graph, Tuple[str, ...]]


class BimoduleError(DomainError):
    """Invalid bimodule data or a decoration that does not fit its vertex."""


# =============================================================================
# Koszul signs
# =============================================================================

def koszul_sign(degrees: Sequence[int], order: Sequence[int]) -> int:
    """
    Sign of listing homogeneous factors in a new order.

    Args:
        degrees: Degree of each factor in its original position
        order: order[k] is the original index of the factor placed k-th

    Returns:
        +1 or -1: one -1 for each pair of odd factors that trade places
    """
    sign = 1
    for a in range(len(order)):
        da = degrees[order[a]] % 2
        if not da:
            continue
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and degrees[order[b]] % 2:
                sign = -sign
    return sign


def flag_permutation(old: Sequence[str], new: Sequence[str],
                     flag_map: Optional[Mapping[str, str]] = None) -> List[int]:
    """perm[i] = position in `new` of the image of old[i]."""
    index = {f: i for i, f in enumerate(new)}
    if flag_map is None:
        return [index[f] for f in old]
    return [index[flag_map[f]] for f in old]


def _is_identity(perm: Sequence[int]) -> bool:
    return all(i == p for i, p in enumerate(perm))


def _permute(vec: Vec, perm: Sequence[int], generators: Sequence[GradedMap]) -> Vec:
    """Act by the permutation sending position i to perm[i], one adjacent swap at a time."""
    if _is_identity(perm):
        return dict(vec)
    arr = list(perm)
    out = dict(vec)
    changed = True
    while changed:
        changed = False
        for j in range(len(arr) - 1):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                out = generators[j].apply(out)
                changed = True
    return out


# =============================================================================
# Components and bimodules
# =============================================================================

@dataclass(frozen=True, eq=False)
class Component:
    """
    One biarity (m, n) of a Sigma-bimodule.

    Attributes:
        arity: (outputs, inputs)
        space: Graded basis of E(m,n)
        d: Differential
        left: Matrices of s_1..s_{m-1} acting on outputs
        right: Matrices of s_1..s_{n-1} acting on inputs
    """

    arity: Arity
    space: GradedSpace
    d: GradedMap
    left: Tuple[GradedMap, ...] = ()
    right: Tuple[GradedMap, ...] = ()

    @cached_property
    def trivial_actions(self) -> bool:
        ident = identity(self.space)
        return all(g == ident for g in self.left + self.right)

    def degree(self, element: str) -> int:
        return self.space.degree(element)

    @cached_property
    def _shifted_d(self) -> GradedMap:
        return shifted_map(self.d, 1)

    def differential(self, shift: int = 0) -> GradedMap:
        """d on E, or the induced differential -d on E[1]."""
        return self._shifted_d if shift % 2 else self.d

    def act(self, vec: Vec, out_perm: Sequence[int], in_perm: Sequence[int]) -> Vec:
        """Move output position i to out_perm[i] and input position j to in_perm[j]."""
        if self.trivial_actions:
            return dict(vec)
        vec = _permute(vec, out_perm, self.left)
        return _permute(vec, in_perm, self.right)


@dataclass(frozen=True, eq=False)
class SigmaBimodule:
    """Finite table (m, n) -> Component."""

    components: Dict[Arity, Component]
    name: str = ""

    def component(self, arity: Arity) -> Component:
        try:
            return self.components[tuple(arity)]
        except KeyError:
            raise BimoduleError("arity-mismatch", f"No component of biarity {tuple(arity)} in {self.name or 'bimodule'}")

    def has(self, arity: Arity) -> bool:
        return tuple(arity) in self.components

    @property
    def arities(self) -> List[Arity]:
        return sorted(self.components)

    def degree(self, arity: Arity, element: str, shift: int = 0) -> int:
        return self.component(arity).degree(element) - shift

    def basis(self, arity: Arity) -> Tuple[str, ...]:
        return self.component(arity).space.ids if self.has(arity) else ()

    def validate(self) -> "SigmaBimodule":
        """
        Check d^2 = 0, the Coxeter relations, commuting actions and
        equivariance of d in every component.

        Raises:
            BimoduleError: d-not-square-zero, action-relation-violated,
                actions-not-commuting or d-not-equivariant
        """
        for arity, comp in sorted(self.components.items()):
            label = f"component {arity}"
            witness = square_zero_witness(comp.d)
            if witness is not None:
                raise BimoduleError("d-not-square-zero", f"{label}: d(d({witness})) is nonzero")
            m, n = arity
            if len(comp.left) != max(m - 1, 0) or len(comp.right) != max(n - 1, 0):
                raise BimoduleError("action-relation-violated", f"{label}: wrong number of generators")
            ident = identity(comp.space)
            for side, gens in (("left", comp.left), ("right", comp.right)):
                for i, s in enumerate(gens):
                    if s.degree != 0 and not s.is_zero():
                        raise BimoduleError("action-relation-violated", f"{label}: {side} s_{i + 1} has nonzero degree")
                    if compose(s, s) != ident:
                        raise BimoduleError("action-relation-violated", f"{label}: {side} s_{i + 1} is not an involution")
                    if i + 1 < len(gens):
                        t = gens[i + 1]
                        st = compose(s, t)
                        if compose(st, compose(st, st)) != ident:
                            raise BimoduleError("action-relation-violated",
                                                f"{label}: {side} braid relation fails at s_{i + 1}")
                    for j in range(i + 2, len(gens)):
                        if compose(s, gens[j]) != compose(gens[j], s):
                            raise BimoduleError("action-relation-violated",
                                                f"{label}: {side} s_{i + 1} and s_{j + 1} do not commute")
                    if compose(comp.d, s) != compose(s, comp.d):
                        raise BimoduleError("d-not-equivariant", f"{label}: d does not commute with {side} s_{i + 1}")
            for s in comp.left:
                for t in comp.right:
                    if compose(s, t) != compose(t, s):
                        raise BimoduleError("actions-not-commuting", f"{label}: left and right actions do not commute")
        return self


def make_component(arity: Arity, space: GradedSpace, d: Optional[GradedMap] = None,
                   left: Sequence[GradedMap] = (), right: Sequence[GradedMap] = ()) -> Component:
    """Component with trivial actions and zero differential unless given."""
    m, n = arity
    ident = identity(space)
    left = tuple(left) if left else tuple(ident for _ in range(max(m - 1, 0)))
    right = tuple(right) if right else tuple(ident for _ in range(max(n - 1, 0)))
    if d is None:
        d = GradedMap(space, space, 1, {})
    return Component(tuple(arity), space, d, left, right)


def parse_arity(text) -> Arity:
    if isinstance(text, str):
        m, n = text.split(",")
        return int(m), int(n)
    m, n = text
    return int(m), int(n)


def make_bimodule(spec: dict, name: str = "") -> SigmaBimodule:
    """
    Build and validate a bimodule from its JSON description.

    Format:
        {"components": {"2,1": {"basis": [["x", 0], ...],
                                "d": [["x", "y", "1"], ...],
                                "left": [[entries of s_1], ...],
                                "right": [...]}}}

    Missing action generators default to the identity.
    """
    components: Dict[Arity, Component] = {}
    for key, data in spec.get("components", {}).items():
        arity = parse_arity(key)
        space = space_from_json(data.get("basis", []))
        d = map_from_json(data.get("d", []), space, space, degree=1)
        left = [map_from_json(entries, space, space, degree=0) for entries in data.get("left", [])]
        right = [map_from_json(entries, space, space, degree=0) for entries in data.get("right", [])]
        components[arity] = make_component(arity, space, d, left, right)
    return SigmaBimodule(components, name or spec.get("name", "")).validate()


def bimodule_to_json(bm: SigmaBimodule) -> dict:
    return {
        "name": bm.name,
        "components": {
            f"{m},{n}": {
                "basis": space_to_json(c.space),
                "d": map_to_json(c.d),
                "left": [map_to_json(s) for s in c.left],
                "right": [map_to_json(s) for s in c.right],
            }
            for (m, n), c in sorted(bm.components.items())
        },
    }


# =============================================================================
# Decorated graphs
# =============================================================================

@dataclass(frozen=True)
class DecoratedGraph:
    """A graph with one basis decoration per vertex, in vertex order, and a coefficient."""

    graph: Graph
    decorations: Tuple[str, ...]
    coefficient: Fraction = Fraction(1)

    @property
    def key(self) -> Key:
        return self.graph, self.decorations


def decoration_degrees(bm: SigmaBimodule, G: Graph, decs: Sequence[str], shift: int = 0) -> List[int]:
    return [bm.degree(G.arity(v), e, shift) for v, e in zip(G.vertices, decs)]


def decorate(bm: SigmaBimodule, G: Graph, assignment: Sequence[Tuple[str, str]],
             shift: int = 0, coefficient=1) -> DecoratedGraph:
    """
    Decorate G from (vertex, basis element) pairs given in any order.

    Raises:
        BimoduleError: arity-mismatch naming the vertex, or bad-assignment
            when a vertex is missing or decorated twice
    """
    vertices = [v for v, _ in assignment]
    if sorted(vertices) != sorted(G.vertices) or len(set(vertices)) != len(vertices):
        raise BimoduleError("bad-assignment", "Every vertex needs exactly one decoration")
    degrees = []
    for v, e in assignment:
        arity = G.arity(v)
        if not bm.has(arity) or e not in bm.component(arity).space:
            raise BimoduleError("arity-mismatch", f"'{e}' is not an element of E{arity} at vertex '{v}'")
        degrees.append(bm.degree(arity, e, shift))
    position = {v: i for i, v in enumerate(G.vertices)}
    order = sorted(range(len(assignment)), key=lambda i: position[assignment[i][0]])
    sign = koszul_sign(degrees, order)
    decs = tuple(assignment[i][1] for i in order)
    return DecoratedGraph(G, decs, Fraction(coefficient) * sign)


def expand(vectors: Sequence[Vec], coefficient: Fraction = Fraction(1)) -> Iterator[Tuple[Tuple[str, ...], Fraction]]:
    """Multilinear expansion of a tensor product of vectors."""
    for combo in product(*(list(v.items()) for v in vectors)):
        c = coefficient
        for _, x in combo:
            c *= x
        if c != 0:
            yield tuple(b for b, _ in combo), c


def transport(bm: SigmaBimodule, G: Graph, decs: Sequence[str], H: Graph,
              flag_map: Mapping[str, str], vertex_map: Mapping[str, str],
              shift: int = 0, coefficient: Fraction = Fraction(1)) -> Dict[Key, Fraction]:
    """
    Carry a decorated term along an isomorphism G -> H.

    Each decoration is acted on by the permutation its flags undergo, and
    the factors are re-sorted into H's vertex order with the Koszul sign.
    """
    vectors, degrees, targets = [], [], []
    for v, e in zip(G.vertices, decs):
        arity = G.arity(v)
        w = vertex_map[v]
        comp = bm.component(arity)
        out_perm = flag_permutation(G.out_flags(v), H.out_flags(w), flag_map)
        in_perm = flag_permutation(G.in_flags(v), H.in_flags(w), flag_map)
        vectors.append(comp.act({e: Fraction(1)}, out_perm, in_perm))
        degrees.append(comp.degree(e) - shift)
        targets.append(w)
    position = {w: i for i, w in enumerate(H.vertices)}
    order = sorted(range(len(targets)), key=lambda i: position[targets[i]])
    sign = koszul_sign(degrees, order)
    out: Dict[Key, Fraction] = {}
    for new_decs, c in expand([vectors[i] for i in order], coefficient * sign):
        key = (H, new_decs)
        out[key] = out.get(key, Fraction(0)) + c
    return out


def _vertex_map_of(G: Graph, flag_map: Mapping[str, str]) -> Dict[str, str]:
    out = {}
    for v in G.vertices:
        flags = G.vertex_flags[v]
        out[v] = G.vertex_of[flag_map[flags[0]]] if flags else v
    return out


# =============================================================================
# Free elements
# =============================================================================

class FreeElement:
    """
    Finite Q-linear combination of decorated graphs.

    Attributes:
        bimodule: Where decorations live
        shift: 0 for decorations in E, 1 for E[1] (degrees lowered by one)
        terms: (graph, decorations) -> nonzero coefficient
        normal: Whether every key is canonical and automorphism-averaged
    """

    __slots__ = ("bimodule", "shift", "terms", "normal")

    def __init__(self, bimodule: SigmaBimodule, terms: Optional[Mapping[Key, Fraction]] = None,
                 shift: int = 0, normal: bool = False):
        self.bimodule = bimodule
        self.shift = shift
        self.terms: Dict[Key, Fraction] = {k: Fraction(c) for k, c in (terms or {}).items() if c != 0}
        self.normal = normal

    @classmethod
    def of(cls, bimodule: SigmaBimodule, dg: DecoratedGraph, shift: int = 0) -> "FreeElement":
        return cls(bimodule, {dg.key: dg.coefficient}, shift)

    @classmethod
    def single(cls, bimodule: SigmaBimodule, G: Graph, decs: Sequence[str], shift: int = 0,
               coefficient=1) -> "FreeElement":
        return cls(bimodule, {(G, tuple(decs)): Fraction(coefficient)}, shift)

    # ---------------------------------------------------------------- algebra

    def _like(self, terms: Mapping[Key, Fraction], normal: bool = False) -> "FreeElement":
        return FreeElement(self.bimodule, terms, self.shift, normal)

    def _check(self, other: "FreeElement") -> None:
        if other.bimodule is not self.bimodule or other.shift != self.shift:
            raise BimoduleError("space-mismatch", "Free elements over different bimodules or shifts")

    def __add__(self, other: "FreeElement") -> "FreeElement":
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            total = terms.get(k, Fraction(0)) + c
            if total == 0:
                terms.pop(k, None)
            else:
                terms[k] = total
        return self._like(terms, self.normal and other.normal)

    def __neg__(self) -> "FreeElement":
        return self._like({k: -c for k, c in self.terms.items()}, self.normal)

    def __sub__(self, other: "FreeElement") -> "FreeElement":
        return self + (-other)

    def scaled(self, coefficient) -> "FreeElement":
        c = Fraction(coefficient)
        return self._like({k: c * v for k, v in self.terms.items()}, self.normal)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> List[Tuple[Key, Fraction]]:
        return list(self.terms.items())

    def term_degree(self, key: Key) -> int:
        G, decs = key
        return sum(decoration_degrees(self.bimodule, G, decs, self.shift))

    def degrees(self) -> List[int]:
        return sorted({self.term_degree(k) for k in self.terms})

    def weight_part(self, weight: int) -> "FreeElement":
        """Terms whose graph has exactly `weight` vertices."""
        return self._like({k: c for k, c in self.terms.items() if k[0].size == weight}, self.normal)

    # ---------------------------------------------------------- normal forms

    def normalized(self) -> "FreeElement":
        """Canonical presentations, averaged over graph automorphisms."""
        if self.normal:
            return self
        bm, shift = self.bimodule, self.shift
        out: Dict[Key, Fraction] = {}
        for (G, decs), c in self.terms.items():
            cf = canonical_form(G)
            Gc = cf.graph
            moved = transport(bm, G, decs, Gc, cf.flag_map, cf.vertex_map, shift, c)
            auts = automorphisms(Gc)
            weight = Fraction(1, len(auts))
            for (H, decs2), c2 in moved.items():
                if len(auts) == 1:
                    add_into(out, {(H, decs2): c2})
                    continue
                for alpha in auts:
                    vmap = _vertex_map_of(Gc, alpha)
                    add_into(out, transport(bm, Gc, decs2, Gc, alpha, vmap, shift, c2 * weight))
        return self._like(out, normal=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeElement):
            return NotImplemented
        if other.bimodule is not self.bimodule or other.shift != self.shift:
            return False
        return self.normalized().terms == other.normalized().terms

    __hash__ = None

    def __repr__(self) -> str:
        return f"FreeElement({len(self.terms)} terms, shift={self.shift})"

    def describe(self, limit: int = 6) -> str:
        """Short human-readable listing of the first terms."""
        parts = []
        for (G, decs), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0].size, kv[0][1]))[:limit]:
            parts.append(f"{format_scalar(c)}*[{' '.join(decs)}]@{G.size}v")
        more = "" if len(self.terms) <= limit else f" (+{len(self.terms) - limit} more)"
        return " + ".join(parts) + more if parts else "0"

    def to_json(self) -> list:
        return [
            {"graph": graph_to_json(G), "decorations": list(decs), "coefficient": format_scalar(c)}
            for (G, decs), c in self.terms.items()
        ]


def relabel(x: FreeElement, sigma_out: Sequence[int], sigma_in: Sequence[int]) -> FreeElement:
    """
    Renumber the legs: output l becomes sigma_out[l-1], input l becomes sigma_in[l-1].

    Raises:
        BimoduleError: size-mismatch when a permutation does not fit a term
    """
    terms: Dict[Key, Fraction] = {}
    for (G, decs), c in x.terms.items():
        if sorted(sigma_out) != list(range(1, G.m + 1)) or sorted(sigma_in) != list(range(1, G.n + 1)):
            raise BimoduleError("size-mismatch", f"Permutations of sizes ({len(sigma_out)},{len(sigma_in)}) "
                                                 f"do not act on biarity ({G.m},{G.n})")
        H = G.relabeled({f: sigma_out[l - 1] for f, l in G.out_labels.items()},
                        {f: sigma_in[l - 1] for f, l in G.in_labels.items()})
        add_into(terms, {(H, decs): c})
    return FreeElement(x.bimodule, terms, x.shift).normalized()


def free_differential(x: FreeElement) -> FreeElement:
    """
    The induced differential: d applied to one decoration at a time, with
    the sign of passing the decorations before it.
    """
    bm, shift = x.bimodule, x.shift
    out: Dict[Key, Fraction] = {}
    for (G, decs), c in x.terms.items():
        degrees = decoration_degrees(bm, G, decs, shift)
        passed = 0
        for i, (v, e) in enumerate(zip(G.vertices, decs)):
            d = bm.component(G.arity(v)).differential(shift)
            image = d.image(e)
            sign = -1 if passed % 2 else 1
            for e2, coeff in image.items():
                add_into(out, {(G, decs[:i] + (e2,) + decs[i + 1:]): c * sign * coeff})
            passed += degrees[i]
    return FreeElement(bm, out, shift)


# =============================================================================
# Decoration domains
# =============================================================================

def decoration_tuples(bm: SigmaBimodule, G: Graph, limit: int = 48,
                      rng: Optional[np.random.Generator] = None) -> List[Tuple[str, ...]]:
    """
    Basis decorations of G: every tuple when there are at most `limit`,
    otherwise `limit` distinct tuples drawn with rng.
    """
    bases = [bm.basis(G.arity(v)) for v in G.vertices]
    if any(not b for b in bases):
        return []
    total = 1
    for b in bases:
        total *= len(b)
    if total <= limit:
        return [tuple(t) for t in product(*bases)]
    rng = rng if rng is not None else np.random.default_rng(0)
    chosen: Dict[Tuple[str, ...], None] = {}
    attempts = 0
    while len(chosen) < limit and attempts < limit * 20:
        pick = tuple(b[int(rng.integers(len(b)))] for b in bases)
        chosen.setdefault(pick, None)
        attempts += 1
    return list(chosen)


def random_element(bm: SigmaBimodule, G: Graph, rng: np.random.Generator, shift: int = 0,
                   terms: int = 3) -> FreeElement:
    """Random integer combination of basis decorations on G."""
    out: Dict[Key, Fraction] = {}
    bases = [bm.basis(G.arity(v)) for v in G.vertices]
    if any(not b for b in bases):
        return FreeElement(bm, {}, shift)
    for _ in range(terms):
        decs = tuple(b[int(rng.integers(len(b)))] for b in bases)
        coefficient = int(rng.integers(1, 4)) * (1 if rng.integers(2) else -1)
        add_into(out, {(G, decs): Fraction(coefficient)})
    return FreeElement(bm, out, shift)
