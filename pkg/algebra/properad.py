"""
Properads, their contraction maps and the coderivations built from them.

Conventions used throughout:

    - A 2-vertex graph has one thick edge; its target vertex receives the
      edges. mu(target, source) composes the source decoration into the
      target, so for an algebra mu(e1, e2) = e1 o e2.
    - The value of any map on a subgraph H is read relative to H's legs in
      label order, which for induced subgraphs is the natural order of the
      boundary flags, i.e. the flag order of the merged vertex in G/H.
    - Every map applied to some of the factors of a decorated graph moves
      those factors to the front with the Koszul sign, evaluates, and sorts
      the result back into vertex order with the Koszul sign
      (contract_with). No other call site introduces signs.
    - Shifted decorations (elements of P[1]) have degree deg - 1; the
      shifted differential is -d, and
      mu~(s^-1 p1, s^-1 p2) = (-1)^|p1| s^-1 mu(p1, p2).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from natsort import natsorted

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import DomainError, Print
from algebra.bimodule import (
    Arity, FreeElement, Key, SigmaBimodule, decoration_degrees, decoration_tuples, free_differential,
    koszul_sign, transport,
)
from algebra.exactlinalg import Vec, add_into, format_scalar, parse_scalar, scale_vec
from algebra.reports import CheckRecord, failed, passed
from combinatorics.catalog import enumerate_arity_graphs, graphs_up_to
from combinatorics.graphcore import (
    IN, NATKEY, OUT, Graph, ThickEdge, canonical_form, enumerate_admissible_subgraphs, enumerate_splittings,
    graph_from_json, graph_to_json, line_graph, merge_id, shape_label,
)
from combinatorics.trees import ContractionTree, enumerate_T, realizes


class PropertyError(DomainError):
    """Properad data or an argument that does not fit the operation."""


# =============================================================================
# Shared contraction primitive
# =============================================================================

@lru_cache(maxsize=65536)
def _induced(G: Graph, subset: FrozenSet[str]) -> Graph:
    return G.induced(subset)


@lru_cache(maxsize=65536)
def _contracted(G: Graph, subset: FrozenSet[str]) -> Graph:
    return G.contract_vertices(subset)


Evaluator = Callable[[Graph, Tuple[str, ...]], Vec]


def contract_with(bm: SigmaBimodule, evaluator: Evaluator, G: Graph, decs: Sequence[str],
                  subset: Iterable[str], shift: int = 0,
                  coefficient: Fraction = Fraction(1)) -> Dict[Key, Fraction]:
    """
    Replace the vertices of `subset` by one vertex decorated with the
    evaluator's value on the induced subgraph.

    Args:
        bm: Bimodule of the decorations
        evaluator: (induced subgraph, its decorations in vertex order) -> vector
        G: Graph of the term
        decs: Decorations in G's vertex order
        subset: Vertices to merge (a single vertex is allowed)
        shift: 1 when decorations live in E[1]
        coefficient: Coefficient of the input term

    Returns:
        Terms of G/subset with their coefficients
    """
    subset = frozenset(subset)
    verts = G.vertices
    degrees = decoration_degrees(bm, G, decs, shift)
    inside = [i for i, v in enumerate(verts) if v in subset]
    outside = [i for i, v in enumerate(verts) if v not in subset]
    sign = koszul_sign(degrees, inside + outside)
    value = evaluator(_induced(G, subset), tuple(decs[i] for i in inside))
    if not value:
        return {}
    Q = _contracted(G, subset)
    merged = merge_id(subset)
    names = [merged] + [verts[i] for i in outside]
    rest_decs = [decs[i] for i in outside]
    rest_degrees = [degrees[i] for i in outside]
    position = {v: k for k, v in enumerate(Q.vertices)}
    order = sorted(range(len(names)), key=lambda k: position[names[k]])
    arity = Q.arity(merged)
    out: Dict[Key, Fraction] = {}
    for x, c in value.items():
        s2 = koszul_sign([bm.degree(arity, x, shift)] + rest_degrees, order)
        listed = [x] + rest_decs
        key = (Q, tuple(listed[k] for k in order))
        out[key] = out.get(key, Fraction(0)) + coefficient * sign * s2 * c
    return {k: c for k, c in out.items() if c != 0}


def _linear(x: FreeElement, fn: Callable[[Graph, Tuple[str, ...], Fraction], Dict[Key, Fraction]],
            shift: Optional[int] = None) -> FreeElement:
    out: Dict[Key, Fraction] = {}
    for (G, decs), c in x.terms.items():
        add_into(out, fn(G, decs, c))
    return FreeElement(x.bimodule, out, x.shift if shift is None else shift)


def ends(graph2: Graph) -> Tuple[str, str]:
    """(target, source) of a 2-vertex graph."""
    if graph2.size != 2 or len(graph2.thick_edges) != 1:
        raise PropertyError("not-two-vertex", f"Expected a 2-vertex graph, got {shape_label(graph2)}")
    te = graph2.thick_edges[0]
    return te.target, te.source


# =============================================================================
# Compositions
# =============================================================================

class Composition(Protocol):
    """
    Rule for composing two decorations along a 2-vertex graph.

    mu(graph2, target, source) returns an element of the component of the
    merged vertex, relative to graph2's legs in label order.
    """

    name: str

    def mu(self, graph2: Graph, target: str, source: str) -> Vec:
        ...


class TableComposition:
    """
    Finite rule table on fixed 2-vertex shapes.

    Rules are stored on the presentation they were given on; inputs on any
    isomorphic presentation are carried over through canonical forms and the
    Sigma-actions before the table is read.
    """

    def __init__(self, bimodule: SigmaBimodule, name: str = "table"):
        self.bimodule = bimodule
        self.name = name
        self._shapes: Dict[Graph, Graph] = {}
        self._rules: Dict[Graph, Dict[Tuple[str, str], Vec]] = {}

    def add_rule(self, graph2: Graph, target: str, source: str, value: Vec) -> None:
        canon = canonical_form(graph2).graph
        presentation = self._shapes.setdefault(canon, graph2)
        if presentation != graph2:
            raise PropertyError("shape-not-in-table", "Rules for one shape must share a presentation")
        rules = self._rules.setdefault(graph2, {})
        add_into(rules.setdefault((target, source), {}), value)

    def add_shape(self, graph2: Graph) -> None:
        """Register a shape whose products all vanish."""
        canon = canonical_form(graph2).graph
        self._shapes.setdefault(canon, graph2)
        self._rules.setdefault(self._shapes[canon], {})

    @property
    def shapes(self) -> List[Graph]:
        return list(self._rules)

    def mu(self, graph2: Graph, target: str, source: str) -> Vec:
        cf = canonical_form(graph2)
        R = self._shapes.get(cf.graph)
        if R is None:
            raise PropertyError("shape-not-in-table", f"No composition rules for {shape_label(graph2)}")
        rules = self._rules[R]
        if R == graph2:
            return dict(rules.get((target, source), {}))
        cfR = canonical_form(R)
        back_f = {c: f for f, c in cfR.flag_map.items()}
        back_v = {c: v for v, c in cfR.vertex_map.items()}
        flag_map = {f: back_f[c] for f, c in cf.flag_map.items()}
        vertex_map = {v: back_v[c] for v, c in cf.vertex_map.items()}
        t, _ = ends(graph2)
        first = graph2.vertices[0] == t
        decs = (target, source) if first else (source, target)
        sign = 1 if first else self._swap_sign(graph2, target, source)
        moved = transport(self.bimodule, graph2, decs, R, flag_map, vertex_map, 0, Fraction(sign))
        tR, _ = ends(R)
        out: Vec = {}
        for (_, decs_R), c in moved.items():
            if R.vertices[0] == tR:
                add_into(out, rules.get((decs_R[0], decs_R[1]), {}), c)
            else:
                c2 = c * self._swap_sign(R, decs_R[1], decs_R[0])
                add_into(out, rules.get((decs_R[1], decs_R[0]), {}), c2)
        return out

    def _swap_sign(self, graph2: Graph, target: str, source: str) -> int:
        t, s = ends(graph2)
        odd = self.bimodule.degree(graph2.arity(t), target) % 2 and self.bimodule.degree(graph2.arity(s), source) % 2
        return -1 if odd else 1


class EndomorphismComposition:
    """Composition of linear maps: (b<a) o (d<c) = [a == d] (b<c)."""

    def __init__(self, maps: Dict[str, Tuple[str, str]], name: str = "endomorphism"):
        self.name = name
        self._maps = dict(maps)
        self._ids = {pair: i for i, pair in maps.items()}

    def mu(self, graph2: Graph, target: str, source: str) -> Vec:
        b, a = self._maps[target]
        d, c = self._maps[source]
        if a != d:
            return {}
        return {self._ids[(b, c)]: Fraction(1)}


class CommutativeComposition:
    """
    Weighted copies of a graded commutative algebra A in every biarity.

    Basis element "w{w}:{a}" is a in A at weight w; composing multiplies in
    A and adds weights, and vanishes past the weight bound.
    """

    def __init__(self, bimodule: SigmaBimodule, products: Dict[Tuple[str, str], Vec],
                 weight_bound: int, name: str = "commutative"):
        self.bimodule = bimodule
        self.name = name
        self._products = products
        self.weight_bound = weight_bound

    @staticmethod
    def element(weight: int, a: str) -> str:
        return f"w{weight}:{a}"

    @staticmethod
    def parse(element: str) -> Tuple[int, str]:
        w, a = element.split(":", 1)
        return int(w[1:]), a

    def mu(self, graph2: Graph, target: str, source: str) -> Vec:
        w1, a = self.parse(target)
        w2, b = self.parse(source)
        w = w1 + w2
        if w > self.weight_bound:
            return {}
        return {self.element(w, x): c for x, c in self._products.get((a, b), {}).items()}


class GraftingComposition:
    """
    Composition in a truncated free properad: the decorations are graphs of
    generators, and composing substitutes them into the two vertices.
    """

    def __init__(self, basis_graphs: Dict[str, Graph], weight_bound: int, name: str = "grafting"):
        self.name = name
        self.weight_bound = weight_bound
        self._graphs = dict(basis_graphs)
        self._ids = {g: i for i, g in basis_graphs.items()}

    def graph(self, element: str) -> Graph:
        return self._graphs[element]

    def element(self, G: Graph) -> Optional[str]:
        return self._ids.get(canonical_form(G).graph)

    def mu(self, graph2: Graph, target: str, source: str) -> Vec:
        t, s = ends(graph2)
        inner = {t: self._graphs[target], s: self._graphs[source]}
        if sum(g.size for g in inner.values()) > self.weight_bound:
            return {}
        G = substitute(graph2, inner)
        found = self.element(G)
        if found is None:
            raise PropertyError("shape-not-in-table", f"Grafted graph {shape_label(G)} is outside the basis")
        return {found: Fraction(1)}


def substitute(outer: Graph, inner: Dict[str, Graph]) -> Graph:
    """
    Replace every vertex v of `outer` by the graph inner[v], whose output leg
    i takes the place of v's i-th out-flag and input leg j of its j-th in-flag.
    """
    vertex_flags: Dict[str, List[str]] = {}
    partner: Dict[str, str] = {}
    direction: Dict[str, str] = {}
    attach: Dict[str, str] = {}
    for k, v in enumerate(outer.vertices):
        g = inner[v]
        prefix = f"s{k + 1}."
        fm = {f: prefix + f for f in g.flags}
        for u in g.vertices:
            vertex_flags[f"{prefix}{u}"] = [fm[f] for f in g.vertex_flags[u]]
        for a, b in g.partner.items():
            partner[fm[a]] = fm[b]
        for f, d in g.direction.items():
            direction[fm[f]] = d
        outs = {l: f for f, l in g.out_labels.items()}
        ins = {l: f for f, l in g.in_labels.items()}
        for i, f in enumerate(outer.out_flags(v)):
            attach[f] = fm[outs[i + 1]]
        for j, f in enumerate(outer.in_flags(v)):
            attach[f] = fm[ins[j + 1]]
    for o, i in outer.edges:
        partner[attach[o]] = attach[i]
    out_labels = {attach[f]: l for f, l in outer.out_labels.items()}
    in_labels = {attach[f]: l for f, l in outer.in_labels.items()}
    return Graph(vertex_flags, partner, direction, out_labels, in_labels)


# =============================================================================
# Properads
# =============================================================================

@dataclass(frozen=True, eq=False)
class Properad:
    """
    A dg properad given by its underlying bimodule and a composition rule.

    Attributes:
        bimodule: Underlying Sigma-bimodule with differential
        composition: The mu rule on 2-vertex graphs
        unit: Optional degree-0 element of the (1,1) component
        name: Instance name used in reports
        arities: Vertex biarities used to build check domains
    """

    bimodule: SigmaBimodule
    composition: Composition
    unit: Optional[Vec] = None
    name: str = ""
    arities: Tuple[Arity, ...] = ()

    @property
    def check_arities(self) -> List[Arity]:
        return list(self.arities) if self.arities else self.bimodule.arities


def mu_apply(P: Properad, graph2: Graph, decs: Sequence[str]) -> Vec:
    """mu on a 2-vertex graph with decorations in vertex order."""
    t, s = ends(graph2)
    e_t, e_s = (decs[0], decs[1]) if graph2.vertices[0] == t else (decs[1], decs[0])
    sign = 1
    if graph2.vertices[0] != t:
        if P.bimodule.degree(graph2.arity(t), e_t) % 2 and P.bimodule.degree(graph2.arity(s), e_s) % 2:
            sign = -1
    return scale_vec(P.composition.mu(graph2, e_t, e_s), sign)


def mu_tilde(P: Properad, graph2: Graph, decs: Sequence[str]) -> Vec:
    """The degree-1 composition on P[1], decorations in vertex order."""
    t, s = ends(graph2)
    bm = P.bimodule
    e_t, e_s = (decs[0], decs[1]) if graph2.vertices[0] == t else (decs[1], decs[0])
    deg_t = bm.degree(graph2.arity(t), e_t)
    deg_s = bm.degree(graph2.arity(s), e_s)
    sign = -1 if deg_t % 2 else 1
    if graph2.vertices[0] != t and (deg_t - 1) % 2 and (deg_s - 1) % 2:
        sign = -sign
    return scale_vec(P.composition.mu(graph2, e_t, e_s), sign)


def _edge_subset(G: Graph, eps) -> FrozenSet[str]:
    if isinstance(eps, ThickEdge):
        source, target = eps.source, eps.target
    else:
        source, target = eps
    if not any(te.source == source and te.target == target for te in G.thick_edges):
        raise PropertyError("inadmissible", f"No thick edge {source}->{target}")
    subset = frozenset([source, target])
    if not _contracted(G, subset).is_acyclic():
        raise PropertyError("inadmissible", f"Contracting {source}->{target} creates a directed cycle")
    return subset


def mu_contract(P: Properad, x: FreeElement, eps) -> FreeElement:
    """
    mu along one admissible thick edge, given as a ThickEdge or (source, target).

    Raises:
        PropertyError: inadmissible when the edge is missing or its
            contraction creates a cycle
    """
    evaluator = lambda H, d: mu_apply(P, H, d)

    def step(G, decs, c):
        return contract_with(P.bimodule, evaluator, G, decs, _edge_subset(G, eps), x.shift, c)

    return _linear(x, step)


def mu_tree(P: Properad, x: FreeElement, t: ContractionTree) -> FreeElement:
    """
    Contract along a binary contraction tree, children before parents.

    Raises:
        PropertyError: invalid-tree when t is not in T_G for a term's graph
    """
    evaluator = lambda H, d: mu_apply(P, H, d)
    out: Dict[Key, Fraction] = {}
    for (G, decs), c in x.terms.items():
        if not realizes(G, t, binary=True):
            raise PropertyError("invalid-tree", f"{t.label()} is not a binary contraction tree of {shape_label(G)}")
        current = {(G, decs): c}
        for node in t.internal_nodes():
            subset = frozenset(merge_id(child.leaves) for child in node.children)
            following: Dict[Key, Fraction] = {}
            for (H, d), c2 in current.items():
                add_into(following, contract_with(P.bimodule, evaluator, H, d, subset, x.shift, c2))
            current = following
        add_into(out, current)
    return FreeElement(x.bimodule, out, x.shift)


def _witness(G: Graph, decs: Sequence[str], **extra) -> dict:
    data = {"graph": graph_to_json(G), "decorations": list(decs)}
    data.update(extra)
    return data


def check_associativity(P: Properad, limit: int = 48, rng: Optional[np.random.Generator] = None,
                        graphs: Optional[List[Graph]] = None) -> List[CheckRecord]:
    """
    mu_t = mu_t' for all binary trees of every 3-vertex graph over the check
    arities and every basis decoration (sampled above `limit`).
    """
    identity = "mu_t(X) = mu_t'(X) for t, t' in T_G, |v(G)| = 3"
    graphs = graphs if graphs is not None else enumerate_arity_graphs(3, P.check_arities)
    Print("DEBUG", f"Associativity of {P.name or 'properad'} on {len(graphs)} graphs")
    records = []
    for G in graphs:
        trees = enumerate_T(G)
        failure = None
        count = 0
        for decs in decoration_tuples(P.bimodule, G, limit, rng):
            x = FreeElement.single(P.bimodule, G, decs)
            values = [mu_tree(P, x, t) for t in trees]
            count += 1
            if any(v != values[0] for v in values[1:]):
                failure = _witness(G, decs, trees=[t.to_json() for t in trees])
                break
        if failure is None:
            records.append(passed(shape_label(G), identity, f"{count} decorations, {len(trees)} trees"))
        else:
            records.append(failed(shape_label(G), identity, failure))
    return records


def check_derivation(P: Properad, limit: int = 48, rng: Optional[np.random.Generator] = None) -> List[CheckRecord]:
    """d mu = mu d_F on every 2-vertex graph over the check arities."""
    identity = "d(mu(X)) = mu(d_F X)"
    records = []
    for G in enumerate_arity_graphs(2, P.check_arities):
        eps = G.thick_edges[0]
        failure = None
        for decs in decoration_tuples(P.bimodule, G, limit, rng):
            x = FreeElement.single(P.bimodule, G, decs)
            if free_differential(mu_contract(P, x, eps)) != mu_contract(P, free_differential(x), eps):
                failure = _witness(G, decs)
                break
        records.append(passed(shape_label(G), identity) if failure is None
                       else failed(shape_label(G), identity, failure))
    return records


def _unit_graph(m: int, n: int, side: str, position: int) -> Tuple[Graph, str, str]:
    """
    A vertex w of biarity (m, n) with a (1,1) vertex u grafted onto its
    output (side 'out') or input (side 'in') at `position`, flags named so
    the merged vertex lists its flags in w's positions.
    """
    vf = {"u": [], "w": []}
    partner, direction = {}, {}
    outs, ins = [], []
    for i in range(1, m + 1):
        vf["w"].append(f"f{i}")
        direction[f"f{i}"] = OUT
        if side == "out" and i == position:
            partner[f"f{i}"] = f"f{i}y"
            vf["u"] += [f"f{i}y", f"f{i}x"]
            direction[f"f{i}y"], direction[f"f{i}x"] = IN, OUT
            outs.append(f"f{i}x")
        else:
            outs.append(f"f{i}")
    for j in range(1, n + 1):
        vf["w"].append(f"g{j}")
        direction[f"g{j}"] = IN
        if side == "in" and j == position:
            partner[f"g{j}y"] = f"g{j}"
            vf["u"] += [f"g{j}y", f"g{j}x"]
            direction[f"g{j}y"], direction[f"g{j}x"] = OUT, IN
            ins.append(f"g{j}x")
        else:
            ins.append(f"g{j}")
    G = Graph(vf, partner, direction,
              {f: i + 1 for i, f in enumerate(natsorted(outs))},
              {f: i + 1 for i, f in enumerate(natsorted(ins))})
    return G, "u", "w"


def check_unit(P: Properad) -> List[CheckRecord]:
    """mu(eta(1), p) = p = mu(p, eta(1)) on every leg of every basis element."""
    if P.unit is None:
        return []
    records = []
    bm = P.bimodule
    for (m, n) in bm.arities:
        identity = "mu(eta(1), p) = mu(p, eta(1)) = p"
        failure = None
        for e in bm.basis((m, n)):
            for side, count in (("out", m), ("in", n)):
                for position in range(1, count + 1):
                    G, u, w = _unit_graph(m, n, side, position)
                    total: Vec = {}
                    for x, c in P.unit.items():
                        decs = (x, e) if G.vertices[0] == u else (e, x)
                        add_into(total, mu_apply(P, G, decs), c)
                    if total != {e: Fraction(1)}:
                        failure = {"element": e, "side": side, "position": position,
                                   "value": {k: format_scalar(v) for k, v in total.items()}}
                        break
                if failure:
                    break
            if failure:
                break
        label = f"corolla ({m},{n})"
        records.append(passed(label, identity) if failure is None else failed(label, identity, failure))
    return records


# =============================================================================
# Cocomposition
# =============================================================================

Piece = Tuple[Graph, Tuple[str, ...]]
Pieces = Dict[Tuple[Piece, ...], Fraction]


def piece_degree(bm: SigmaBimodule, piece: Piece, tilde: bool, shift: int = 0) -> int:
    G, decs = piece
    if tilde:
        return sum(decoration_degrees(bm, G, decs, 0)) + 1
    return sum(decoration_degrees(bm, G, decs, shift))


def cocomposition(bm: SigmaBimodule, G: Graph, decs: Sequence[str], tilde: bool = False,
                  shift: int = 0, coefficient: Fraction = Fraction(1)) -> Pieces:
    """
    Sum over 2-splittings of G, receiving block first.

    The plain version reorders the decorations with the Koszul sign of
    their (possibly shifted) degrees. The tilde version reorders with the
    unshifted degrees and adds (-1) to the total degree of the receiving
    block; its pieces have degree one more than their decorations.
    """
    degrees = decoration_degrees(bm, G, decs, 0 if tilde else shift)
    index = {v: i for i, v in enumerate(G.vertices)}
    out: Pieces = {}
    for s in enumerate_splittings(G, 2):
        b1, b2 = s.target_first()
        order = [index[v] for v in b1] + [index[v] for v in b2]
        sign = koszul_sign(degrees, order)
        if tilde and sum(degrees[index[v]] for v in b1) % 2:
            sign = -sign
        pieces = tuple((_induced(G, frozenset(b)), tuple(decs[index[v]] for v in b)) for b in (b1, b2))
        out[pieces] = out.get(pieces, Fraction(0)) + coefficient * sign
    return {k: c for k, c in out.items() if c != 0}


def apply_to_piece(bm: SigmaBimodule, pieces: Pieces, index: int, tilde: bool = False,
                   shift: int = 0) -> Pieces:
    """Cocompose the piece at `index` of every term (Id, .., Delta, .., Id)."""
    out: Pieces = {}
    for key, c in pieces.items():
        sign = 1
        if tilde and sum(piece_degree(bm, p, True) for p in key[:index]) % 2:
            sign = -1
        G, decs = key[index]
        for sub, c2 in cocomposition(bm, G, decs, tilde, shift, c * sign).items():
            new = key[:index] + sub + key[index + 1:]
            out[new] = out.get(new, Fraction(0)) + c2
    return {k: c for k, c in out.items() if c != 0}


def normalize_pieces(bm: SigmaBimodule, pieces: Pieces, tilde: bool = False, shift: int = 0) -> Pieces:
    """Sort the pieces of every term by their first vertex, with the Koszul sign."""
    out: Pieces = {}
    for key, c in pieces.items():
        degrees = [piece_degree(bm, p, tilde, shift) for p in key]
        order = sorted(range(len(key)), key=lambda i: NATKEY(key[i][0].vertices[0]))
        new = tuple(key[i] for i in order)
        out[new] = out.get(new, Fraction(0)) + c * koszul_sign(degrees, order)
    return {k: c for k, c in out.items() if c != 0}


def iterated_cocomposition(bm: SigmaBimodule, G: Graph, decs: Sequence[str], index: int,
                           tilde: bool = False) -> Pieces:
    """(Delta, Id) Delta for index 0, (Id, Delta) Delta for index 1; normalized."""
    first = cocomposition(bm, G, decs, tilde)
    return normalize_pieces(bm, apply_to_piece(bm, first, index, tilde), tilde)


# =============================================================================
# Coderivations
# =============================================================================

class CoderivationFamily(Protocol):
    """
    Per-graph components of a coderivation on the cofree coproperad.

    evaluate(H, decs) is the component on a connected graph H, decorations in
    H's vertex order, returning an element of the component of H's biarity
    relative to H's legs in label order. Corollas carry the (shifted)
    differential.
    """

    bimodule: SigmaBimodule
    degree: int
    bound: Optional[int]

    def evaluate(self, graph: Graph, decorations: Tuple[str, ...]) -> Vec:
        ...


class BarFamily:
    """-d on corollas, mu~ on 2-vertex graphs, zero beyond."""

    degree = 1
    bound = None

    def __init__(self, properad: Properad):
        self.properad = properad
        self.bimodule = properad.bimodule

    def evaluate(self, graph: Graph, decorations: Tuple[str, ...]) -> Vec:
        if graph.size == 1:
            comp = self.bimodule.component(graph.arity(graph.vertices[0]))
            return comp.differential(1).image(decorations[0])
        if graph.size == 2:
            return mu_tilde(self.properad, graph, decorations)
        return {}


class DifferentialFamily:
    """Only the (shifted) differential: the order-one coderivation."""

    degree = 1
    bound = None

    def __init__(self, bimodule: SigmaBimodule, shift: int = 1):
        self.bimodule = bimodule
        self.shift = shift

    def evaluate(self, graph: Graph, decorations: Tuple[str, ...]) -> Vec:
        if graph.size != 1:
            return {}
        return self.bimodule.component(graph.arity(graph.vertices[0])).differential(self.shift).image(decorations[0])


def _check_bound(fam: CoderivationFamily, size: int) -> None:
    if fam.bound is not None and size > fam.bound:
        raise PropertyError("missing-family-entry", f"The family is only known up to {fam.bound} vertices")


def apply_family(fam: CoderivationFamily, G: Graph, decs: Sequence[str], shift: int = 1,
                 coefficient: Fraction = Fraction(1)) -> Dict[Key, Fraction]:
    """Sum over admissible subgraphs H of the term with H replaced by fam(H)."""
    out: Dict[Key, Fraction] = {}
    for sub in enumerate_admissible_subgraphs(G):
        _check_bound(fam, len(sub.vertices))
        add_into(out, contract_with(fam.bimodule, fam.evaluate, G, decs, sub.vertices, shift, coefficient))
    return out


def coderivation_apply(fam: CoderivationFamily, x: FreeElement) -> FreeElement:
    """
    The coderivation determined by a family.

    Raises:
        PropertyError: missing-family-entry when a subgraph exceeds the
            family's bound
    """
    return _linear(x, lambda G, decs, c: apply_family(fam, G, decs, x.shift, c))


def project(x: FreeElement) -> FreeElement:
    """The corolla (weight one) part."""
    return x.weight_part(1)


def coderivation_square(fam: CoderivationFamily, x: FreeElement) -> FreeElement:
    return coderivation_apply(fam, coderivation_apply(fam, x))


def bar_differential(P: Properad, x: FreeElement) -> FreeElement:
    """d_F + d_mu on the bar construction; x must carry shifted decorations."""
    if x.shift != 1:
        raise PropertyError("space-mismatch", "The bar differential acts on P[1]-decorated graphs")
    return coderivation_apply(BarFamily(P), x)


def coderivation_law_defect(fam: CoderivationFamily, G: Graph, decs: Sequence[str], shift: int = 1) -> Pieces:
    """
    Delta d - (d, Id) Delta - (Id, d) Delta on one term, with the Koszul
    convention on shifted degrees; zero for every family.
    """
    bm = fam.bimodule
    lhs: Pieces = {}
    for (Q, decs2), c in apply_family(fam, G, decs, shift).items():
        for key, c2 in cocomposition(bm, Q, decs2, False, shift, c).items():
            lhs[key] = lhs.get(key, Fraction(0)) + c2
    rhs: Pieces = {}
    for key, c in cocomposition(bm, G, decs, False, shift).items():
        for index in range(2):
            sign = -1 if index == 1 and fam.degree % 2 and piece_degree(bm, key[0], False, shift) % 2 else 1
            H, hdecs = key[index]
            for (H2, decs2), c2 in apply_family(fam, H, hdecs, shift, c * sign).items():
                new = key[:index] + ((H2, decs2),) + key[index + 1:]
                rhs[new] = rhs.get(new, Fraction(0)) + c2
    lhs = normalize_pieces(bm, lhs, False, shift)
    rhs = normalize_pieces(bm, rhs, False, shift)
    defect = dict(lhs)
    for k, c in rhs.items():
        defect[k] = defect.get(k, Fraction(0)) - c
    return {k: c for k, c in defect.items() if c != 0}


# =============================================================================
# Sh-properads
# =============================================================================

@dataclass(frozen=True, eq=False)
class ShProperad:
    """
    A bimodule with a degree-1 family mu_G on P[1]-decorated graphs up to
    `bound` vertices, corollas carrying the shifted differential.
    """

    bimodule: SigmaBimodule
    family: CoderivationFamily
    bound: int
    name: str = ""
    arities: Tuple[Arity, ...] = ()

    @property
    def check_arities(self) -> List[Arity]:
        return list(self.arities) if self.arities else self.bimodule.arities


def check_sh(S: ShProperad, max_vertices: Optional[int] = None, limit: int = 48,
             rng: Optional[np.random.Generator] = None,
             graphs: Optional[List[Graph]] = None) -> List[CheckRecord]:
    """
    sum over H in G of mu_{G/H} mu_H = 0 on every graph up to the bound and
    every basis decoration (sampled above `limit`).
    """
    identity = "sum_{H in G} mu_{G/H} mu_H = 0"
    max_vertices = min(max_vertices or S.bound, S.bound)
    if graphs is None:
        graphs = graphs_up_to(max_vertices, S.check_arities)
    records = []
    for G in graphs:
        failure = None
        count = 0
        for decs in decoration_tuples(S.bimodule, G, limit, rng):
            x = FreeElement.single(S.bimodule, G, decs, shift=1)
            value = project(coderivation_square(S.family, x)).normalized()
            count += 1
            if not value.is_zero():
                failure = _witness(G, decs, value=value.describe())
                break
        records.append(passed(shape_label(G), identity, f"{count} decorations") if failure is None
                       else failed(shape_label(G), identity, failure))
    return records


def strict_as_sh(P: Properad, bound: int = 5) -> ShProperad:
    """A dg properad seen as an sh-properad: mu~ on 2-vertex graphs only."""
    return ShProperad(P.bimodule, BarFamily(P), bound, name=P.name, arities=P.arities)


# =============================================================================
# JSON
# =============================================================================

def _vec_from_json(entries) -> Vec:
    out: Vec = {}
    for element, value in entries:
        add_into(out, {str(element): parse_scalar(value)})
    return out


def properad_from_json(data: dict, bimodule: SigmaBimodule, name: str = "") -> Properad:
    """
    Table properad over a validated bimodule.

    Format:
        {"mu": [{"shape": <2-vertex graph>, "rules": [["e_t", "e_s", [["out", "3/2"]]]]}],
         "products": [["a", "b", [["c", "1"]]]],
         "unit": [["1", "1"]]}

    "products" is shorthand for rules on the 2-vertex line in biarity (1,1).
    """
    table = TableComposition(bimodule, name or data.get("name", "table"))
    for block in data.get("mu", []):
        shape = graph_from_json(block["shape"])
        table.add_shape(shape)
        for target, source, value in block.get("rules", []):
            table.add_rule(shape, str(target), str(source), _vec_from_json(value))
    if "products" in data:
        line = line_graph(2)
        table.add_shape(line)
        for a, b, value in data["products"]:
            table.add_rule(line, str(a), str(b), _vec_from_json(value))
    unit = _vec_from_json(data["unit"]) if data.get("unit") else None
    arities = tuple(tuple(a) for a in data.get("arities", []))
    return Properad(bimodule, table, unit, name or data.get("name", ""), arities)
