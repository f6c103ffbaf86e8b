"""
Directed flag graphs and their contractions.

A graph is a set of flags (half-edges), an involution pairing flags into
edges, and a partition of the flags into vertices. Unpaired flags are legs.
Every flag carries a direction: an edge runs from the vertex holding its
"out" flag to the vertex holding its "in" flag, and legs are outputs or
inputs of the whole graph, numbered 1..m and 1..n.

Vertex ids survive contraction: contracting a set of vertices produces a
vertex whose id joins the atomic ids with '+', in natural sort order, so
contracting v1 and v3 always yields 'v1+v3' no matter the order of the
steps that got there.

Usage:
    G = graph_from_edges([("v2", "v1"), ("v3", "v1")], out_legs=["v1"], in_legs=["v2", "v3"])
    for sub in enumerate_admissible_subgraphs(G):
        print(sorted(sub.vertices))
    canon = canonical_form(G).graph
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from natsort import natsort_keygen, natsorted

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import DomainError

NATKEY = natsort_keygen()

OUT = "out"
IN = "in"
MERGE_SEPARATOR = "+"


class GraphError(DomainError):
    """Invalid graph operation (not an edge, not a thick edge, bad graft...)."""


class GraphValidationError(GraphError):
    """
    A raw graph failed validation.

    Attributes:
        violations: Every violated invariant as (code, message), in check order
    """

    def __init__(self, violations: List[Tuple[str, str]]):
        self.violations = list(violations)
        super().__init__(violations[0][0], "; ".join(f"{c}: {m}" for c, m in violations))


def merge_id(vertices: Iterable[str]) -> str:
    """Id of the vertex obtained by contracting the given vertices."""
    atoms = [a for v in vertices for a in v.split(MERGE_SEPARATOR)]
    return MERGE_SEPARATOR.join(natsorted(atoms))


# =============================================================================
# Raw graphs
# =============================================================================

@dataclass(frozen=True)
class RawGraph:
    """
    Flags, involution and partition without direction or labels.

    Attributes:
        flags: The flag set
        pairs: The two-element orbits of the involution
        blocks: (vertex id, flags) per block of the partition
    """

    flags: Tuple[str, ...]
    pairs: Tuple[Tuple[str, str], ...]
    blocks: Tuple[Tuple[str, Tuple[str, ...]], ...]

    @cached_property
    def sigma(self) -> Dict[str, str]:
        s = {f: f for f in self.flags}
        for a, b in self.pairs:
            s[a], s[b] = b, a
        return s

    @cached_property
    def block_of(self) -> Dict[str, str]:
        return {f: vid for vid, fs in self.blocks for f in fs}

    @property
    def vertices(self) -> List[str]:
        return [vid for vid, _ in self.blocks]

    @property
    def legs(self) -> List[str]:
        return [f for f in self.flags if self.sigma.get(f, f) == f]

    def loops(self) -> List[Tuple[str, str]]:
        return [(a, b) for a, b in self.pairs if self.block_of.get(a) == self.block_of.get(b)]


def raw_violations(raw: RawGraph) -> List[Tuple[str, str]]:
    """Involution and partition invariants violated by a raw graph."""
    violations: List[Tuple[str, str]] = []
    seen: Set[str] = set()
    for f in raw.flags:
        if f in seen:
            violations.append(("duplicate-flag", f"Flag '{f}' listed twice"))
        seen.add(f)

    partner: Dict[str, str] = {}
    for a, b in raw.pairs:
        for x in (a, b):
            if x not in seen:
                violations.append(("unknown-flag", f"Involution mentions unknown flag '{x}'"))
        if a == b:
            continue
        for x, y in ((a, b), (b, a)):
            if x in partner and partner[x] != y:
                violations.append((
                    "involution-not-involutive",
                    f"Flag '{x}' is paired with both '{partner[x]}' and '{y}'"
                ))
            partner.setdefault(x, y)

    owner: Dict[str, str] = {}
    vids: Set[str] = set()
    for vid, fs in raw.blocks:
        if vid in vids:
            violations.append(("partition-overlap", f"Vertex id '{vid}' used twice"))
        vids.add(vid)
        if not fs:
            violations.append(("partition-overlap", f"Block '{vid}' is empty"))
        for f in fs:
            if f not in seen:
                violations.append(("unknown-flag", f"Block '{vid}' holds unknown flag '{f}'"))
            elif f in owner:
                violations.append(("partition-overlap", f"Flag '{f}' lies in blocks '{owner[f]}' and '{vid}'"))
            else:
                owner[f] = vid
    missing = [f for f in raw.flags if f not in owner]
    if missing and raw.blocks:
        violations.append(("partition-overlap", f"Flags outside every block: {', '.join(natsorted(missing))}"))
    return violations


def contract_single_edge(raw: RawGraph, edge: Tuple[str, str]) -> RawGraph:
    """
    Contract one edge (i j): remove both flags and merge their blocks.

    Raises:
        GraphError: If (i, j) is not a two-element orbit of the involution
    """
    i, j = edge
    if (i, j) not in raw.pairs and (j, i) not in raw.pairs or i == j:
        raise GraphError("not-an-edge", f"({i} {j}) is not an edge")
    bi, bj = raw.block_of[i], raw.block_of[j]
    merged = bi if bi == bj else merge_id([bi, bj])
    blocks = []
    placed = False
    for vid, fs in raw.blocks:
        if vid in (bi, bj):
            if placed:
                continue
            union = [f for b, fl in raw.blocks if b in (bi, bj) for f in fl if f not in (i, j)]
            blocks.append((merged, tuple(union)))
            placed = True
        else:
            blocks.append((vid, fs))
    return RawGraph(
        flags=tuple(f for f in raw.flags if f not in (i, j)),
        pairs=tuple(p for p in raw.pairs if set(p) != {i, j}),
        blocks=tuple(blocks),
    )


# =============================================================================
# Directed labeled graphs
# =============================================================================

@dataclass(frozen=True)
class ThickEdge:
    """All edges from source to target, as (out flag, in flag) pairs."""

    source: str
    target: str
    edges: Tuple[Tuple[str, str], ...]


class Graph:
    """
    Directed, labeled flag graph.

    Instances are immutable and hashable; equality is equality of flag
    names, vertex ids, involution, directions and labels (a presentation),
    not isomorphism. Use canonical_form() to compare up to isomorphism.
    Graphs built by contraction may contain directed cycles; validate() and
    is_acyclic() are the gatekeepers.
    """

    def __init__(self, vertex_flags: Mapping[str, Iterable[str]], partner: Mapping[str, str],
                 direction: Mapping[str, str], out_labels: Mapping[str, int],
                 in_labels: Mapping[str, int], trivial: bool = False):
        self.vertex_flags: Dict[str, Tuple[str, ...]] = {
            v: tuple(natsorted(fs)) for v, fs in vertex_flags.items()
        }
        self.partner: Dict[str, str] = {}
        for a, b in partner.items():
            self.partner[a] = b
            self.partner[b] = a
        self.direction: Dict[str, str] = dict(direction)
        self.out_labels: Dict[str, int] = {f: int(l) for f, l in out_labels.items()}
        self.in_labels: Dict[str, int] = {f: int(l) for f, l in in_labels.items()}
        self.trivial = trivial
        self.vertices: Tuple[str, ...] = tuple(natsorted(self.vertex_flags))
        self.vertex_of: Dict[str, str] = {f: v for v, fs in self.vertex_flags.items() for f in fs}
        self._outs = {v: tuple(f for f in fs if self.direction.get(f) == OUT)
                      for v, fs in self.vertex_flags.items()}
        self._ins = {v: tuple(f for f in fs if self.direction.get(f) == IN)
                     for v, fs in self.vertex_flags.items()}
        self.key = (
            tuple((v, self.vertex_flags[v]) for v in self.vertices),
            tuple(sorted((a, b) for a, b in self.partner.items() if self.direction.get(a) == OUT)),
            tuple(sorted(self.direction.items())),
            tuple(sorted(self.out_labels.items())),
            tuple(sorted(self.in_labels.items())),
            trivial,
        )
        self._hash = hash(self.key)

    # ------------------------------------------------------------------ basics

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._hash == other._hash and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Graph({shape_label(self)})"

    @cached_property
    def flags(self) -> Tuple[str, ...]:
        names = set(self.direction) | set(self.out_labels) | set(self.in_labels)
        return tuple(natsorted(names))

    def out_flags(self, v: str) -> Tuple[str, ...]:
        """Out-flags at v (edge sources and output legs) in natural order."""
        return self._outs[v]

    def in_flags(self, v: str) -> Tuple[str, ...]:
        return self._ins[v]

    def arity(self, v: str) -> Tuple[int, int]:
        return len(self._outs[v]), len(self._ins[v])

    @property
    def m(self) -> int:
        return len(self.out_labels)

    @property
    def n(self) -> int:
        return len(self.in_labels)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @cached_property
    def edges(self) -> Tuple[Tuple[str, str], ...]:
        """Every edge as (out flag, in flag), in natural order of the out flag."""
        return tuple((f, self.partner[f]) for f in self.flags
                     if f in self.partner and self.direction.get(f) == OUT)

    def edge_ends(self, edge: Tuple[str, str]) -> Tuple[str, str]:
        return self.vertex_of[edge[0]], self.vertex_of[edge[1]]

    @cached_property
    def out_legs(self) -> Tuple[str, ...]:
        """Output legs in label order."""
        return tuple(sorted(self.out_labels, key=self.out_labels.get))

    @cached_property
    def in_legs(self) -> Tuple[str, ...]:
        return tuple(sorted(self.in_labels, key=self.in_labels.get))

    @cached_property
    def thick_edges(self) -> Tuple[ThickEdge, ...]:
        groups: Dict[Tuple[str, str], List[Tuple[str, str]]] = {}
        for e in self.edges:
            groups.setdefault(self.edge_ends(e), []).append(e)
        return tuple(ThickEdge(u, w, tuple(es))
                     for (u, w), es in sorted(groups.items(), key=lambda kv: (NATKEY(kv[0][0]), NATKEY(kv[0][1]))))

    @cached_property
    def successors(self) -> Dict[str, Set[str]]:
        succ: Dict[str, Set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            u, w = self.edge_ends(e)
            succ[u].add(w)
        return succ

    @cached_property
    def neighbours(self) -> Dict[str, Set[str]]:
        nb: Dict[str, Set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            u, w = self.edge_ends(e)
            nb[u].add(w)
            nb[w].add(u)
        return nb

    def is_acyclic(self) -> bool:
        """No directed cycle in the thick-edge digraph; a loop counts as a cycle."""
        indegree = {v: 0 for v in self.vertices}
        for u, targets in self.successors.items():
            for w in targets:
                if w == u:
                    return False
                indegree[w] += 1
        queue = [v for v, k in indegree.items() if k == 0]
        visited = 0
        while queue:
            u = queue.pop()
            visited += 1
            for w in self.successors[u]:
                indegree[w] -= 1
                if indegree[w] == 0:
                    queue.append(w)
        return visited == len(self.vertices)

    def is_connected(self) -> bool:
        if self.trivial:
            return True
        if not self.vertices:
            return False
        return self.subset_connected(self.vertices)

    def subset_connected(self, subset: Iterable[str]) -> bool:
        """Whether the subgraph induced on subset is connected."""
        subset = set(subset)
        if not subset:
            return False
        start = next(iter(subset))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self.neighbours[u]:
                if w in subset and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen == subset

    def targets_of(self, subset: Iterable[str]) -> Set[str]:
        subset = set(subset)
        return {w for u in subset for w in self.successors[u]} - subset

    # ------------------------------------------------------------ derivations

    def induced(self, subset: Iterable[str]) -> "Graph":
        """
        Subgraph on a vertex subset.

        Edges with both ends inside are kept; every other flag at the subset
        becomes a leg. Legs are numbered in natural order of their flag
        names, separately per direction.
        """
        subset = set(subset)
        vf = {v: self.vertex_flags[v] for v in subset}
        flags = [f for fs in vf.values() for f in fs]
        partner = {f: self.partner[f] for f in flags
                   if f in self.partner and self.vertex_of[self.partner[f]] in subset}
        direction = {f: self.direction[f] for f in flags}
        legs = [f for f in flags if f not in partner]
        outs = natsorted(f for f in legs if direction[f] == OUT)
        ins = natsorted(f for f in legs if direction[f] == IN)
        return Graph(vf, partner, direction,
                     {f: i + 1 for i, f in enumerate(outs)},
                     {f: i + 1 for i, f in enumerate(ins)})

    def contract_vertices(self, subset: Iterable[str]) -> "Graph":
        """
        G/S: replace the vertices of S by one vertex carrying S's boundary
        flags; edges inside S disappear. Labels are unchanged.
        """
        subset = set(subset)
        if len(subset) <= 1:
            return self
        merged = merge_id(subset)
        internal = {f for v in subset for f in self.vertex_flags[v]
                    if f in self.partner and self.vertex_of[self.partner[f]] in subset}
        boundary = [f for v in subset for f in self.vertex_flags[v] if f not in internal]
        vf = {v: fs for v, fs in self.vertex_flags.items() if v not in subset}
        vf[merged] = boundary
        partner = {a: b for a, b in self.partner.items() if a not in internal}
        direction = {f: d for f, d in self.direction.items() if f not in internal}
        return Graph(vf, partner, direction, self.out_labels, self.in_labels)

    def quotient(self, blocks: Iterable[Iterable[str]]) -> "Graph":
        """Contract every block of a vertex partition."""
        g = self
        for block in blocks:
            block = list(block)
            if len(block) > 1:
                g = g.contract_vertices(block)
        return g

    def relabeled(self, out_labels: Mapping[str, int], in_labels: Mapping[str, int]) -> "Graph":
        return Graph(self.vertex_flags, self.partner, self.direction, out_labels, in_labels, self.trivial)

    def renamed(self, flag_map: Mapping[str, str], vertex_map: Mapping[str, str]) -> "Graph":
        fm = lambda f: flag_map.get(f, f)
        return Graph(
            {vertex_map.get(v, v): [fm(f) for f in fs] for v, fs in self.vertex_flags.items()},
            {fm(a): fm(b) for a, b in self.partner.items()},
            {fm(f): d for f, d in self.direction.items()},
            {fm(f): l for f, l in self.out_labels.items()},
            {fm(f): l for f, l in self.in_labels.items()},
            self.trivial,
        )


def shape_label(G: Graph) -> str:
    """Compact human-readable description, e.g. '3v v2>v1,v3>v1 (1,2)'."""
    if G.trivial:
        return "trivial (1,1)"
    edges = ",".join(f"{u}>{w}" for u, w in (G.edge_ends(e) for e in G.edges))
    return f"{G.size}v {edges or '-'} ({G.m},{G.n})"


# =============================================================================
# Construction and validation
# =============================================================================

def validate(raw: RawGraph, direction: Mapping[str, str], out_labels: Mapping[str, int],
             in_labels: Mapping[str, int], trivial: bool = False) -> Graph:
    """
    Check every graph invariant and build the Graph.

    Raises:
        GraphValidationError: Listing all violations (involution-not-involutive,
            partition-overlap, direction-inconsistent-on-edge, disconnected,
            directed-cycle, bad-labeling)
    """
    violations = raw_violations(raw)
    if trivial:
        if len(raw.flags) != 1 or raw.pairs or raw.blocks:
            violations.append(("bad-trivial", "The trivial graph is a single flag with no vertex"))
        flag = raw.flags[0] if raw.flags else "t"
        if dict(out_labels) != {flag: 1} or dict(in_labels) != {flag: 1}:
            violations.append(("bad-labeling", "The trivial flag is output 1 and input 1"))
        if violations:
            raise GraphValidationError(violations)
        return trivial_graph(flag)
    if violations:
        raise GraphValidationError(violations)

    for f in raw.flags:
        if direction.get(f) not in (OUT, IN):
            violations.append(("direction-inconsistent-on-edge", f"Flag '{f}' has no direction"))
    for a, b in raw.pairs:
        if a != b and {direction.get(a), direction.get(b)} != {OUT, IN}:
            violations.append((
                "direction-inconsistent-on-edge",
                f"Edge ({a} {b}) needs exactly one out flag and one in flag"
            ))

    sigma = raw.sigma
    legs = [f for f in raw.flags if sigma[f] == f]
    for side, labels in ((OUT, out_labels), (IN, in_labels)):
        expected = {f for f in legs if direction.get(f) == side}
        if set(labels) != expected:
            violations.append(("bad-labeling", f"{side}-labels must cover exactly the {side}-legs"))
        elif sorted(labels.values()) != list(range(1, len(expected) + 1)):
            violations.append(("bad-labeling", f"{side}-labels are not a bijection onto 1..{len(expected)}"))
    if violations:
        raise GraphValidationError(violations)

    partner = {}
    for a, b in raw.pairs:
        if a != b:
            partner[a] = b
    G = Graph({vid: fs for vid, fs in raw.blocks}, partner, direction, out_labels, in_labels)
    if not G.is_connected():
        violations.append(("disconnected", "Graph is not connected"))
    if raw.loops():
        loop = raw.loops()[0]
        violations.append(("directed-cycle", f"Loop ({loop[0]} {loop[1]}) at vertex '{raw.block_of[loop[0]]}'"))
    elif not G.is_acyclic():
        violations.append(("directed-cycle", "Thick-edge digraph has a directed cycle"))
    if violations:
        raise GraphValidationError(violations)
    return G


def graph_from_edges(edges: Sequence[Tuple[str, str]], out_legs: Sequence[str], in_legs: Sequence[str],
                     vertices: Optional[Sequence[str]] = None) -> Graph:
    """
    Build a graph from vertex-level data.

    Edge k (1-based, in the given order) gets flags 'e{k}o' at its source and
    'e{k}i' at its target; output leg l sits at out_legs[l-1] with flag 'o{l}',
    input leg l at in_legs[l-1] with flag 'i{l}'.
    """
    names = list(vertices) if vertices is not None else []
    for u, w in edges:
        names.extend([u, w])
    names.extend(out_legs)
    names.extend(in_legs)
    vf: Dict[str, List[str]] = {v: [] for v in dict.fromkeys(names)}
    partner, direction = {}, {}
    for k, (u, w) in enumerate(edges, start=1):
        o, i = f"e{k}o", f"e{k}i"
        vf[u].append(o)
        vf[w].append(i)
        partner[o] = i
        direction[o], direction[i] = OUT, IN
    out_labels, in_labels = {}, {}
    for l, v in enumerate(out_legs, start=1):
        vf[v].append(f"o{l}")
        direction[f"o{l}"] = OUT
        out_labels[f"o{l}"] = l
    for l, v in enumerate(in_legs, start=1):
        vf[v].append(f"i{l}")
        direction[f"i{l}"] = IN
        in_labels[f"i{l}"] = l
    return Graph(vf, partner, direction, out_labels, in_labels)


def corolla(m: int, n: int, vertex: str = "v1") -> Graph:
    """One vertex with m output and n input legs."""
    return graph_from_edges([], [vertex] * m, [vertex] * n, vertices=[vertex])


def trivial_graph(flag: str = "t") -> Graph:
    """The vertex-free graph with a single flag that is both output 1 and input 1."""
    return Graph({}, {}, {}, {flag: 1}, {flag: 1}, trivial=True)


def line_graph(k: int) -> Graph:
    """v1 <- v2 <- ... <- vk with the output leg at v1 and the input leg at vk."""
    names = [f"v{i}" for i in range(1, k + 1)]
    return graph_from_edges([(names[i + 1], names[i]) for i in range(k - 1)],
                            out_legs=[names[0]], in_legs=[names[-1]], vertices=names)


# =============================================================================
# Contraction of thick edges and grafting
# =============================================================================

def _require_thick_edge(G: Graph, eps: ThickEdge) -> None:
    if eps not in G.thick_edges:
        raise GraphError("not-a-thick-edge", f"{eps.source}->{eps.target} is not a thick edge of the graph")


def contract_thick_edge(G: Graph, eps: ThickEdge) -> Graph:
    """
    Merge the two endpoints of a thick edge, removing all its edges.

    Raises:
        GraphError: If eps is not a thick edge of G
    """
    _require_thick_edge(G, eps)
    return G.contract_vertices({eps.source, eps.target})


def is_admissible(G: Graph, eps: ThickEdge) -> bool:
    """Whether contracting eps leaves the thick-edge digraph acyclic."""
    return contract_thick_edge(G, eps).is_acyclic()


def _disjoint_copy(G1: Graph, G2: Graph) -> Graph:
    """G2 with flags and vertices renamed away from G1's names."""
    taken_flags = set(G1.flags)
    taken_vertices = set(G1.vertices)
    flag_map, vertex_map = {}, {}
    for f in G2.flags:
        new = f
        while new in taken_flags:
            new += "'"
        flag_map[f] = new
    for v in G2.vertices:
        new = v
        while new in taken_vertices:
            new += "'"
        vertex_map[v] = new
    return G2.renamed(flag_map, vertex_map)


def graft(G1: Graph, G2: Graph, pairs: Sequence[Tuple[int, int]],
          relabeling: Optional[Tuple[Mapping[str, int], Mapping[str, int]]] = None) -> Graph:
    """
    Graft outputs of G2 onto inputs of G1.

    Args:
        G1: Upper graph
        G2: Lower graph
        pairs: (input label of G1, output label of G2) for every new edge
        relabeling: Optional (out_labels, in_labels) by flag for the result;
            by default G1's remaining outputs come first, then G2's, and
            G1's remaining inputs come before G2's

    Raises:
        GraphError: leg-reuse, disconnected-result, cycle-created, bad-labeling
    """
    if G1.trivial or G2.trivial:
        other = G2 if G1.trivial else G1
        if relabeling:
            return other.relabeled(relabeling[0], relabeling[1])
        return other
    if set(G1.flags) & set(G2.flags) or set(G1.vertices) & set(G2.vertices):
        G2 = _disjoint_copy(G1, G2)
    if not pairs:
        raise GraphError("disconnected-result", "Grafting without any pair leaves the result disconnected")

    in_by_label = {l: f for f, l in G1.in_labels.items()}
    out_by_label = {l: f for f, l in G2.out_labels.items()}
    used_in, used_out = set(), set()
    partner = dict(G1.partner)
    partner.update(G2.partner)
    for i_label, o_label in pairs:
        if i_label not in in_by_label or o_label not in out_by_label:
            raise GraphError("leg-reuse", f"Pair ({i_label}, {o_label}) does not name two legs")
        if i_label in used_in or o_label in used_out:
            raise GraphError("leg-reuse", f"Leg used twice in pair ({i_label}, {o_label})")
        used_in.add(i_label)
        used_out.add(o_label)
        partner[out_by_label[o_label]] = in_by_label[i_label]

    if relabeling is not None:
        out_labels, in_labels = dict(relabeling[0]), dict(relabeling[1])
    else:
        outs = list(G1.out_legs) + [f for f in G2.out_legs if G2.out_labels[f] not in used_out]
        ins = [f for f in G1.in_legs if G1.in_labels[f] not in used_in] + list(G2.in_legs)
        out_labels = {f: i + 1 for i, f in enumerate(outs)}
        in_labels = {f: i + 1 for i, f in enumerate(ins)}

    vf = dict(G1.vertex_flags)
    vf.update(G2.vertex_flags)
    direction = dict(G1.direction)
    direction.update(G2.direction)
    G = Graph(vf, partner, direction, out_labels, in_labels)
    expected_out = {f for f in G.flags if f not in G.partner and direction[f] == OUT}
    expected_in = {f for f in G.flags if f not in G.partner and direction[f] == IN}
    if set(out_labels) != expected_out or set(in_labels) != expected_in or \
            sorted(out_labels.values()) != list(range(1, len(expected_out) + 1)) or \
            sorted(in_labels.values()) != list(range(1, len(expected_in) + 1)):
        raise GraphError("bad-labeling", "Relabeling is not a bijection on the remaining legs")
    if not G.is_connected():
        raise GraphError("disconnected-result", "Grafted graph is not connected")
    if not G.is_acyclic():
        raise GraphError("cycle-created", "Grafting created a directed cycle")
    return G


# =============================================================================
# Canonical forms
# =============================================================================

@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """
    Canonical presentation of an isomorphism class.

    Attributes:
        graph: The canonical presentation (vertices v1..vk, legs o<l>/i<l>)
        flag_map: Original flag -> canonical flag
        vertex_map: Original vertex -> canonical vertex
        code: Comparable invariant; equal codes mean isomorphic graphs
    """

    graph: Graph
    flag_map: Dict[str, str]
    vertex_map: Dict[str, str]
    code: tuple


def _signature(G: Graph, v: str, ignore_labels: bool) -> tuple:
    outs = [G.out_labels[f] for f in G.out_flags(v) if f in G.out_labels]
    ins = [G.in_labels[f] for f in G.in_flags(v) if f in G.in_labels]
    if ignore_labels:
        return (len(G.out_flags(v)), len(G.in_flags(v)), len(outs), len(ins))
    return (len(G.out_flags(v)), len(G.in_flags(v)), tuple(sorted(outs)), tuple(sorted(ins)))


def _rank(values: Mapping[str, tuple]) -> Dict[str, int]:
    distinct = sorted(set(values.values()))
    index = {val: i for i, val in enumerate(distinct)}
    return {v: index[val] for v, val in values.items()}


def _min_orderings(G: Graph, ignore_labels: bool) -> Tuple[tuple, List[Tuple[str, ...]]]:
    """Minimal code over refined-colour-respecting vertex orderings, with every ordering reaching it."""
    sig = {v: _signature(G, v, ignore_labels) for v in G.vertices}
    rank = _rank(sig)
    arcs = [G.edge_ends(e) for e in G.edges]
    while True:
        refined = {}
        for v in G.vertices:
            around = sorted([(0, rank[w]) for u, w in arcs if u == v] + [(1, rank[u]) for u, w in arcs if w == v])
            refined[v] = (rank[v], tuple(around))
        new_rank = _rank(refined)
        if len(set(new_rank.values())) == len(set(rank.values())):
            break
        rank = new_rank

    classes: Dict[int, List[str]] = {}
    for v in G.vertices:
        classes.setdefault(rank[v], []).append(v)
    ordered_classes = [classes[r] for r in sorted(classes)]

    best_code = None
    best: List[Tuple[str, ...]] = []
    for choice in product(*(permutations(c) for c in ordered_classes)):
        ordering = tuple(v for block in choice for v in block)
        pos = {v: i for i, v in enumerate(ordering)}
        code = (tuple(sig[v] for v in ordering), tuple(sorted((pos[u], pos[w]) for u, w in arcs)))
        if best_code is None or code < best_code:
            best_code, best = code, [ordering]
        elif code == best_code:
            best.append(ordering)
    return best_code, best


def _canonical_names(G: Graph, ordering: Sequence[str], ignore_labels: bool) -> Tuple[Dict[str, str], Dict[str, str]]:
    pos = {v: i + 1 for i, v in enumerate(ordering)}
    vertex_map = {v: f"v{pos[v]}" for v in ordering}
    flag_map: Dict[str, str] = {}
    if ignore_labels:
        counter = 0
        for v in ordering:
            for f in G.out_flags(v):
                if f in G.out_labels:
                    counter += 1
                    flag_map[f] = f"o{counter}"
        counter = 0
        for v in ordering:
            for f in G.in_flags(v):
                if f in G.in_labels:
                    counter += 1
                    flag_map[f] = f"i{counter}"
    else:
        for f, l in G.out_labels.items():
            flag_map[f] = f"o{l}"
        for f, l in G.in_labels.items():
            flag_map[f] = f"i{l}"
    groups: Dict[Tuple[int, int], List[Tuple[str, str]]] = {}
    for e in G.edges:
        u, w = G.edge_ends(e)
        groups.setdefault((pos[u], pos[w]), []).append(e)
    for (s, t), es in groups.items():
        for r, (o, i) in enumerate(natsorted(es, key=lambda e: e[0]), start=1):
            flag_map[o] = f"e{s}_{t}_{r}o"
            flag_map[i] = f"e{s}_{t}_{r}i"
    return flag_map, vertex_map


@lru_cache(maxsize=65536)
def canonical_form(G: Graph, ignore_labels: bool = False) -> CanonicalForm:
    """
    Canonical presentation by exhaustive search over vertex orderings.

    Vertices are first split by arity and leg labels, the split is refined
    by neighbour colours, and every ordering respecting the refined classes
    is scored by its sorted edge list. With ignore_labels the leg numbering
    is forgotten (shape only).
    """
    if G.trivial:
        return CanonicalForm(G, {f: f for f in G.flags}, {}, ("trivial",))
    code, orderings = _min_orderings(G, ignore_labels)
    flag_map, vertex_map = _canonical_names(G, orderings[0], ignore_labels)
    canon = G.renamed(flag_map, vertex_map)
    if ignore_labels:
        outs = natsorted(flag_map[f] for f in G.out_labels)
        ins = natsorted(flag_map[f] for f in G.in_labels)
        canon = canon.relabeled({f: i + 1 for i, f in enumerate(outs)}, {f: i + 1 for i, f in enumerate(ins)})
    return CanonicalForm(canon, flag_map, vertex_map, code)


def isomorphic(G1: Graph, G2: Graph) -> bool:
    return canonical_form(G1).graph == canonical_form(G2).graph


@lru_cache(maxsize=4096)
def _automorphisms(G: Graph) -> Tuple[Tuple[Tuple[str, str], ...], ...]:
    if G.trivial:
        return (tuple((f, f) for f in G.flags),)
    _, orderings = _min_orderings(G, False)
    base = orderings[0]
    found = {}
    for ordering in orderings:
        alpha = dict(zip(base, ordering))
        # labelled legs are fixed
        legs = {f: f for f in list(G.out_labels) + list(G.in_labels)}
        groups = [(te.edges, [e for e in G.edges if G.edge_ends(e) == (alpha[te.source], alpha[te.target])])
                  for te in G.thick_edges]
        for images in product(*(permutations(dst) for _, dst in groups)):
            mapping = dict(legs)
            for (src, _), dst in zip(groups, images):
                for (o, i), (o2, i2) in zip(src, dst):
                    mapping[o], mapping[i] = o2, i2
            key = tuple(sorted(mapping.items()))
            found[key] = key
    return tuple(found.values())


def automorphisms(G: Graph) -> List[Dict[str, str]]:
    """
    Flag bijections of G onto itself preserving involution, partition,
    direction and leg labels. The identity is always included.
    """
    return [dict(a) for a in _automorphisms(G)]


# =============================================================================
# Subgraphs and splittings
# =============================================================================

@dataclass(frozen=True)
class Subgraph:
    """Vertex subset of a parent graph with its induced flags."""

    parent: Graph
    vertices: FrozenSet[str]

    @property
    def graph(self) -> Graph:
        return self.parent.induced(self.vertices)

    @property
    def is_connected(self) -> bool:
        return self.parent.subset_connected(self.vertices)

    @property
    def is_admissible(self) -> bool:
        return self.is_connected and self.parent.contract_vertices(self.vertices).is_acyclic()

    @property
    def merged_id(self) -> str:
        return merge_id(self.vertices)

    def sorted_vertices(self) -> List[str]:
        return natsorted(self.vertices)


def enumerate_admissible_subgraphs(G: Graph) -> List[Subgraph]:
    """
    All connected vertex subsets whose contraction leaves G acyclic,
    corollas and G itself included; ordered by size, then naturally.
    """
    out = []
    for size in range(1, G.size + 1):
        for subset in combinations(G.vertices, size):
            sub = Subgraph(G, frozenset(subset))
            if size == 1 or sub.is_admissible:
                out.append(sub)
    return out


@dataclass(frozen=True)
class Splitting:
    """
    Partition of v(G) into connected blocks with an acyclic quotient.

    Blocks are listed in the natural order of their merged ids, which is the
    vertex order of the quotient.
    """

    blocks: Tuple[Tuple[str, ...], ...]
    quotient: Graph

    @property
    def block_ids(self) -> Tuple[str, ...]:
        return tuple(merge_id(b) for b in self.blocks)

    def target_first(self) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        """For two blocks: (receiving block, sending block)."""
        if len(self.blocks) != 2:
            raise GraphError("not-a-two-splitting", "target_first needs exactly two blocks")
        a, b = self.blocks
        ids = self.block_ids
        if ids[0] in self.quotient.successors[ids[1]]:
            return a, b
        return b, a


def _set_partitions(items: Sequence[str], k: int) -> Iterable[List[List[str]]]:
    """Partitions of items into exactly k non-empty blocks."""
    n = len(items)

    def grow(i: int, blocks: List[List[str]]):
        if n - i < k - len(blocks):
            return
        if i == n:
            if len(blocks) == k:
                yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(items[i])
            yield from grow(i + 1, blocks)
            b.pop()
        if len(blocks) < k:
            blocks.append([items[i]])
            yield from grow(i + 1, blocks)
            blocks.pop()

    yield from grow(0, [])


def enumerate_splittings(G: Graph, k: int) -> List[Splitting]:
    """
    All partitions of v(G) into k connected blocks whose quotient is acyclic.

    Raises:
        GraphError: If k is not in 1..|v(G)|
    """
    if not 1 <= k <= G.size:
        raise GraphError("k-out-of-range", f"Cannot split {G.size} vertices into {k} blocks")
    out = []
    for blocks in _set_partitions(list(G.vertices), k):
        if not all(G.subset_connected(b) for b in blocks):
            continue
        Q = G.quotient(blocks)
        if not Q.is_acyclic():
            continue
        ordered = sorted((tuple(natsorted(b)) for b in blocks), key=lambda b: NATKEY(merge_id(b)))
        out.append(Splitting(tuple(ordered), Q))
    out.sort(key=lambda s: [NATKEY(merge_id(b)) for b in s.blocks] + [NATKEY(" ".join(b)) for b in s.blocks])
    return out


# =============================================================================
# JSON
# =============================================================================

def _flag_list(value) -> List[str]:
    if isinstance(value, dict):
        return [f for f, on in value.items() if on]
    return list(value or [])


def raw_from_json(data: dict) -> Tuple[RawGraph, Dict[str, str], Dict[str, int], Dict[str, int], bool]:
    """Split a graph document into raw structure, directions and labels."""
    flags = tuple(str(f) for f in data.get("flags", []))
    pairs = tuple((str(a), str(b)) for a, b in data.get("involution", []))
    vertices = data.get("vertices", [])
    if isinstance(vertices, dict):
        blocks = tuple((str(v), tuple(str(f) for f in fs)) for v, fs in vertices.items())
    else:
        blocks = tuple((f"v{i}", tuple(str(f) for f in fs)) for i, fs in enumerate(vertices, start=1))
    direction = {f: OUT for f in _flag_list(data.get("out"))}
    direction.update({f: IN for f in _flag_list(data.get("in"))})
    out_labels = {str(f): int(l) for f, l in data.get("out_labels", {}).items()}
    in_labels = {str(f): int(l) for f, l in data.get("in_labels", {}).items()}
    return RawGraph(flags, pairs, blocks), direction, out_labels, in_labels, bool(data.get("trivial", False))


def graph_from_json(data: dict) -> Graph:
    """
    Parse and validate a graph document.

    Raises:
        GraphValidationError: If the described graph violates an invariant
    """
    raw, direction, out_labels, in_labels, trivial = raw_from_json(data)
    return validate(raw, direction, out_labels, in_labels, trivial)


def graph_to_json(G: Graph) -> dict:
    data = {
        "flags": list(G.flags),
        "involution": [[o, i] for o, i in G.edges],
        "vertices": {v: list(G.vertex_flags[v]) for v in G.vertices},
        "out": natsorted(f for f in G.flags if G.direction.get(f) == OUT or (G.trivial and f in G.out_labels)),
        "in": natsorted(f for f in G.flags if G.direction.get(f) == IN or (G.trivial and f in G.in_labels)),
        "out_labels": {f: G.out_labels[f] for f in G.out_legs},
        "in_labels": {f: G.in_labels[f] for f in G.in_legs},
    }
    if G.trivial:
        data["trivial"] = True
    return data


def thick_edge_by_ends(G: Graph, source: str, target: str) -> ThickEdge:
    for te in G.thick_edges:
        if te.source == source and te.target == target:
            return te
    raise GraphError("not-a-thick-edge", f"No edge from '{source}' to '{target}'")
