"""
Contraction sequences and contraction trees.

A contraction sequence collapses a graph to a corolla one admissible thick
edge at a time. Forgetting the order of independent steps leaves a rooted
tree whose leaves are the vertices of the graph; binary trees form the set
T_G, and trees whose internal vertices may have any arity >= 2 (one step
contracting a whole admissible subgraph) form the larger set T^_G.

Trees are normalized on construction: the children of every internal vertex
are sorted by their naturally sorted leaf sets, so two trees are equal
exactly when they encode the same equivalence class.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from natsort import natsorted

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import DomainError
from combinatorics.graphcore import (
    NATKEY, Graph, Subgraph, ThickEdge, _set_partitions, merge_id,
)


class TreeError(DomainError):
    """Invalid tree, edge or graph for a tree operation."""


Edge = FrozenSet[str]


def _leaf_key(leaves: Iterable[str]) -> tuple:
    return tuple(NATKEY(v) for v in natsorted(leaves))


@dataclass(frozen=True)
class ContractionTree:
    """
    Leaf-labeled rooted tree. A leaf has `leaf` set and no children; an
    internal vertex has at least two children and no leaf label.
    """

    leaf: Optional[str] = None
    children: Tuple["ContractionTree", ...] = ()

    @staticmethod
    def of_leaf(vertex: str) -> "ContractionTree":
        return ContractionTree(leaf=vertex)

    @staticmethod
    def node(children: Iterable["ContractionTree"]) -> "ContractionTree":
        kids = tuple(sorted(children, key=lambda c: _leaf_key(c.leaves)))
        if len(kids) < 2:
            raise TreeError("bad-tree", "An internal vertex needs at least two children")
        return ContractionTree(children=kids)

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None

    @cached_property
    def leaves(self) -> FrozenSet[str]:
        if self.is_leaf:
            return frozenset([self.leaf])
        return frozenset().union(*(c.leaves for c in self.children))

    def is_binary(self) -> bool:
        return self.is_leaf or (len(self.children) == 2 and all(c.is_binary() for c in self.children))

    def internal_nodes(self) -> List["ContractionTree"]:
        """Internal vertices in post-order (children before parents)."""
        if self.is_leaf:
            return []
        out = []
        for c in self.children:
            out.extend(c.internal_nodes())
        out.append(self)
        return out

    def internal_edges(self) -> List[Edge]:
        """
        Edges between two internal vertices, each named by the leaf set of
        its lower end.
        """
        return [n.leaves for n in self.internal_nodes() if n is not self]

    def subtree(self, leaves: Edge) -> "ContractionTree":
        if self.leaves == leaves:
            return self
        for c in self.children:
            if leaves <= c.leaves:
                return c.subtree(leaves)
        raise TreeError("not-internal", f"No subtree with leaves {natsorted(leaves)}")

    def parent_of(self, leaves: Edge) -> "ContractionTree":
        for c in self.children:
            if c.leaves == leaves:
                return self
            if leaves < c.leaves:
                return c.parent_of(leaves)
        raise TreeError("not-internal", f"No subtree with leaves {natsorted(leaves)}")

    def replace(self, leaves: Edge, new: "ContractionTree") -> "ContractionTree":
        """The tree with the subtree on `leaves` swapped for `new`."""
        if self.leaves == leaves:
            return new
        if self.is_leaf:
            return self
        return ContractionTree.node(
            c.replace(leaves, new) if leaves <= c.leaves else c for c in self.children
        )

    def collapse(self, edge: Edge) -> "ContractionTree":
        """t/e: merge the lower end of an internal edge into its parent."""
        parent = self.parent_of(edge)
        lower = self.subtree(edge)
        kids = [c for c in parent.children if c.leaves != edge] + list(lower.children)
        return self.replace(parent.leaves, ContractionTree.node(kids))

    def to_json(self):
        if self.is_leaf:
            return self.leaf
        return [c.to_json() for c in self.children]

    def label(self) -> str:
        if self.is_leaf:
            return self.leaf
        return "(" + ",".join(c.label() for c in self.children) + ")"

    def __repr__(self) -> str:
        return f"ContractionTree{self.label()}"


def tree_from_json(data) -> ContractionTree:
    """Parse nested lists of vertex ids, e.g. [["v1","v2"],"v3"]."""
    if isinstance(data, str):
        return ContractionTree.of_leaf(data)
    if isinstance(data, list):
        return ContractionTree.node(tree_from_json(x) for x in data)
    raise TreeError("bad-tree", f"Cannot read a tree from {data!r}")


def sort_trees(trees: Iterable[ContractionTree]) -> List[ContractionTree]:
    return sorted(trees, key=lambda t: NATKEY(t.label()))


# =============================================================================
# Sequences
# =============================================================================

@dataclass(frozen=True)
class ContractionSequence:
    """Thick edges contracted one after another, each in the graph left by the previous ones."""

    graph: Graph
    steps: Tuple[ThickEdge, ...]

    def stages(self) -> List[Graph]:
        out = [self.graph]
        for te in self.steps:
            out.append(out[-1].contract_vertices({te.source, te.target}))
        return out


def enumerate_sequences(G: Graph) -> List[ContractionSequence]:
    """Every maximal sequence of admissible thick-edge contractions."""
    out: List[ContractionSequence] = []

    def walk(H: Graph, steps: List[ThickEdge]):
        if H.size <= 1:
            out.append(ContractionSequence(G, tuple(steps)))
            return
        for te in H.thick_edges:
            contracted = H.contract_vertices({te.source, te.target})
            if contracted.is_acyclic():
                steps.append(te)
                walk(contracted, steps)
                steps.pop()

    walk(G, [])
    return out


def sequence_to_tree(seq: ContractionSequence) -> ContractionTree:
    """The binary tree recording which clusters each step merged."""
    clusters: Dict[str, ContractionTree] = {v: ContractionTree.of_leaf(v) for v in seq.graph.vertices}
    for te in seq.steps:
        merged = merge_id([te.source, te.target])
        clusters[merged] = ContractionTree.node([clusters.pop(te.source), clusters.pop(te.target)])
    if len(clusters) != 1:
        raise TreeError("incomplete-sequence", "Sequence does not reduce the graph to one vertex")
    return next(iter(clusters.values()))


# =============================================================================
# Tree sets
# =============================================================================

def _valid_split(G: Graph, subset: Iterable[str], blocks: Sequence[Iterable[str]]) -> bool:
    blocks = [list(b) for b in blocks]
    if not all(G.subset_connected(b) for b in blocks):
        return False
    return G.induced(subset).quotient(blocks).is_acyclic()


def _trees_on(G: Graph, binary: bool) -> List[ContractionTree]:
    memo: Dict[FrozenSet[str], List[ContractionTree]] = {}

    def trees(subset: FrozenSet[str]) -> List[ContractionTree]:
        if subset in memo:
            return memo[subset]
        if len(subset) == 1:
            result = [ContractionTree.of_leaf(next(iter(subset)))]
        else:
            result = []
            items = natsorted(subset)
            arities = [2] if binary else range(2, len(items) + 1)
            for k in arities:
                for blocks in _set_partitions(items, k):
                    if not _valid_split(G, subset, blocks):
                        continue
                    options = [trees(frozenset(b)) for b in blocks]
                    for combo in product(*options):
                        result.append(ContractionTree.node(combo))
        memo[subset] = result
        return result

    return sort_trees(trees(frozenset(G.vertices)))


def enumerate_T(G: Graph) -> List[ContractionTree]:
    """
    Binary contraction trees of G.

    Raises:
        TreeError: For a graph with fewer than two vertices
    """
    if G.size < 2:
        raise TreeError("single-vertex", "Tree sets need at least two vertices")
    return _trees_on(G, binary=True)


def enumerate_That(G: Graph) -> List[ContractionTree]:
    """Contraction trees of G with internal vertices of any arity >= 2."""
    if G.size < 2:
        raise TreeError("single-vertex", "Tree sets need at least two vertices")
    return _trees_on(G, binary=False)


def realizes(G: Graph, t: ContractionTree, binary: bool = True) -> bool:
    """Whether t is a contraction tree of G (in T_G, or T^_G when binary=False)."""
    if t.leaves != frozenset(G.vertices):
        return False
    if binary and not t.is_binary():
        return False
    for node in t.internal_nodes():
        if not _valid_split(G, node.leaves, [c.leaves for c in node.children]):
            return False
    return True


def _require_internal(t: ContractionTree, edge: Edge) -> None:
    if frozenset(edge) not in set(t.internal_edges()):
        raise TreeError("not-internal", f"{natsorted(edge)} is not an internal edge")


def lemma1_partner(G: Graph, t: ContractionTree, edge: Edge) -> Tuple[ContractionTree, Edge]:
    """
    The unique other binary tree t' with an internal edge e' such that
    t/e == t'/e'.

    Collapsing e leaves a ternary vertex over clusters A, B (below e) and D;
    of the two other ways to resolve it exactly one is a contraction tree.

    Raises:
        TreeError: not-internal, not-in-T, or no-unique-partner
    """
    edge = frozenset(edge)
    _require_internal(t, edge)
    if not realizes(G, t, binary=True):
        raise TreeError("not-in-T", f"{t.label()} is not a binary contraction tree of the graph")
    parent = t.parent_of(edge)
    lower = t.subtree(edge)
    a, b = lower.children
    d = next(c for c in parent.children if c.leaves != edge)
    found = []
    for inner, other in ((a, b), (b, a)):
        pair = ContractionTree.node([inner, d])
        candidate = t.replace(parent.leaves, ContractionTree.node([pair, other]))
        if realizes(G, candidate, binary=True):
            found.append((candidate, pair.leaves))
    if len(found) != 1:
        raise TreeError("no-unique-partner", f"{len(found)} partners for {t.label()} at {natsorted(edge)}")
    return found[0]


def split_at_edge(G: Graph, t: ContractionTree, edge: Edge) -> Tuple[ContractionTree, ContractionTree, Subgraph]:
    """
    Cut t at an internal edge.

    Returns:
        (t_r, t_l, H): t_r is the part below the edge, a tree on the
        admissible subgraph H it spans; t_l is the rest, a tree on G/H whose
        new leaf is H's merged vertex
    """
    edge = frozenset(edge)
    _require_internal(t, edge)
    t_r = t.subtree(edge)
    t_l = t.replace(edge, ContractionTree.of_leaf(merge_id(edge)))
    return t_r, t_l, Subgraph(G, edge)


def execute_tree(G: Graph, t: ContractionTree) -> Graph:
    """Contract G bottom-up along t; a valid tree ends in a corolla."""
    H = G
    for node in t.internal_nodes():
        H = H.contract_vertices({merge_id(c.leaves) for c in node.children})
    return H
