"""
Exhaustive generation of small graphs up to isomorphism.

Every directed acyclic graph has a topological vertex order, so candidates
are generated with edges only running from later to earlier positions and
deduplicated through canonical_form. The generators feed both the catalog
command and the check domains of the verification suites.
"""

import json
from itertools import combinations, permutations, product
from math import comb
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

# Import utilities for logging - use relative import from repo root
import sys
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import DomainError, Print
from combinatorics.graphcore import Graph, canonical_form, graph_from_edges, graph_to_json, shape_label
from combinatorics.trees import enumerate_That, enumerate_T

Arity = Tuple[int, int]


class CatalogError(DomainError):
    """Requested enumeration is outside the configured guard."""


def _pair_slots(k: int) -> List[Tuple[int, int]]:
    """(target position, source position) with target < source."""
    return [(i, j) for i, j in combinations(range(k), 2)]


def _finish(candidates: Iterable[Graph], ignore_labels: bool = False) -> List[Graph]:
    unique: Dict[Graph, tuple] = {}
    for G in candidates:
        if not G.is_connected():
            continue
        cf = canonical_form(G, ignore_labels)
        unique.setdefault(cf.graph, cf.code)
    return sorted(unique, key=lambda g: (g.size, unique[g]))


def enumerate_skeletons(max_vertices: int, max_multiplicity: int = 1, min_vertices: int = 1) -> List[Graph]:
    """Connected acyclic graphs without legs, up to isomorphism."""
    out: List[Graph] = []
    for k in range(min_vertices, max_vertices + 1):
        names = [f"v{i}" for i in range(1, k + 1)]
        slots = _pair_slots(k)
        candidates = []
        for mult in product(range(max_multiplicity + 1), repeat=len(slots)):
            edges = []
            for (i, j), count in zip(slots, mult):
                edges.extend([(names[j], names[i])] * count)
            candidates.append(graph_from_edges(edges, [], [], vertices=names))
        out.extend(_finish(candidates))
    return out


def enumerate_arity_graphs(k: int, arities: Sequence[Arity], max_multiplicity: int = 1,
                           all_labelings: bool = False) -> List[Graph]:
    """
    Connected acyclic graphs with k vertices whose vertex arities all lie
    in `arities`. Flags not used by edges become legs.

    Args:
        k: Number of vertices
        arities: Allowed (outputs, inputs) per vertex
        max_multiplicity: Maximum number of parallel edges
        all_labelings: Also return every leg numbering up to isomorphism
    """
    names = [f"v{i}" for i in range(1, k + 1)]
    slots = _pair_slots(k)
    candidates = []
    for assignment in product([tuple(a) for a in arities], repeat=k):
        for mult in product(range(max_multiplicity + 1), repeat=len(slots)):
            out_used = [0] * k
            in_used = [0] * k
            edges = []
            for (i, j), count in zip(slots, mult):
                out_used[j] += count
                in_used[i] += count
                edges.extend([(names[j], names[i])] * count)
            if any(out_used[p] > assignment[p][0] or in_used[p] > assignment[p][1] for p in range(k)):
                continue
            out_legs = [names[p] for p in range(k) for _ in range(assignment[p][0] - out_used[p])]
            in_legs = [names[p] for p in range(k) for _ in range(assignment[p][1] - in_used[p])]
            candidates.append(graph_from_edges(edges, out_legs, in_legs, vertices=names))
    graphs = _finish(candidates)
    if not all_labelings:
        return graphs
    relabeled = []
    for G in graphs:
        outs, ins = G.out_legs, G.in_legs
        for po in permutations(range(1, len(outs) + 1)):
            for pi in permutations(range(1, len(ins) + 1)):
                relabeled.append(G.relabeled(dict(zip(outs, po)), dict(zip(ins, pi))))
    return _finish(relabeled)


def graphs_up_to(max_vertices: int, arities: Sequence[Arity], max_multiplicity: int = 1,
                 min_vertices: int = 1) -> List[Graph]:
    out = []
    for k in range(min_vertices, max_vertices + 1):
        out.extend(enumerate_arity_graphs(k, arities, max_multiplicity))
    return out


def skeleton_graphs(max_vertices: int, max_multiplicity: int = 1, min_vertices: int = 1,
                    max_legs_per_side: Optional[int] = None) -> List[Graph]:
    """
    Every edge skeleton up to max_vertices, with one leg added on each side
    of a vertex that has no flag there.

    Vertex arities are unrestricted, so this covers every thick-edge
    structure of the bound. Graphs needing more legs than the guard are
    dropped.
    """
    out: List[Graph] = []
    for skeleton in enumerate_skeletons(max_vertices, max_multiplicity, min_vertices):
        names = list(skeleton.vertices)
        out_legs = [v for v in names if not skeleton.out_flags(v)]
        in_legs = [v for v in names if not skeleton.in_flags(v)]
        if max_legs_per_side is not None and (len(out_legs) > max_legs_per_side
                                              or len(in_legs) > max_legs_per_side):
            continue
        edges = [skeleton.edge_ends(e) for e in skeleton.edges]
        out.append(graph_from_edges(edges, out_legs, in_legs, vertices=names))
    return _finish(out)


def estimate_work(max_vertices: int, m: int, n: int, max_multiplicity: int) -> int:
    return sum((max_multiplicity + 1) ** comb(k, 2) * k ** (m + n) for k in range(1, max_vertices + 1))


def enumerate_graphs(max_vertices: int, m: int, n: int, max_multiplicity: int = 1,
                     max_work: int = 2_000_000, max_legs_per_side: int = 4) -> List[Graph]:
    """
    All graphs in G(m,n) with at most max_vertices vertices, every vertex
    having at least one output and one input flag.

    Raises:
        CatalogError: bound-too-large when the estimated candidate count
            exceeds max_work or the leg counts exceed the guard
    """
    if m < 1 or n < 1:
        raise CatalogError("bound-too-large", "Catalogs need at least one leg per side")
    if m > max_legs_per_side or n > max_legs_per_side:
        raise CatalogError("bound-too-large", f"At most {max_legs_per_side} legs per side")
    work = estimate_work(max_vertices, m, n, max_multiplicity)
    if work > max_work:
        raise CatalogError("bound-too-large",
                           f"About {work} candidates for {max_vertices} vertices and ({m},{n}) legs; "
                           f"the guard allows {max_work}")
    out: List[Graph] = []
    for skeleton in enumerate_skeletons(max_vertices, max_multiplicity):
        names = list(skeleton.vertices)
        k = len(names)
        out_degree = {v: len(skeleton.out_flags(v)) for v in names}
        in_degree = {v: len(skeleton.in_flags(v)) for v in names}
        candidates = []
        for out_place in product(names, repeat=m):
            for in_place in product(names, repeat=n):
                if any(out_degree[v] + out_place.count(v) == 0 or in_degree[v] + in_place.count(v) == 0
                       for v in names):
                    continue
                edges = [skeleton.edge_ends(e) for e in skeleton.edges]
                candidates.append(graph_from_edges(edges, list(out_place), list(in_place), vertices=names))
        out.extend(_finish(candidates))
    out.sort(key=lambda g: (g.size, canonical_form(g).code))
    return out


def dump_catalog(max_vertices: int, m: int, n: int, path: Optional[Path] = None,
                 max_multiplicity: int = 1, max_work: int = 2_000_000,
                 max_legs_per_side: int = 4, max_vertices_guard: int = 5) -> List[dict]:
    """
    Canonical graphs of G(m,n) with their tree counts, in stable order.

    Raises:
        CatalogError: If the bounds exceed the guards
    """
    if max_vertices > max_vertices_guard:
        raise CatalogError("bound-too-large", f"At most {max_vertices_guard} vertices")
    Print("STARTING", f"Catalog of G({m},{n}) up to {max_vertices} vertices")
    entries = []
    for G in enumerate_graphs(max_vertices, m, n, max_multiplicity, max_work, max_legs_per_side):
        entry = {
            "shape": shape_label(G),
            "vertices": G.size,
            "graph": graph_to_json(G),
            "T": len(enumerate_T(G)) if G.size >= 2 else 0,
            "T_hat": len(enumerate_That(G)) if G.size >= 2 else 0,
        }
        entries.append(entry)
    Print("COMPLETED", f"{len(entries)} graphs")
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump({"m": m, "n": n, "max_vertices": max_vertices, "graphs": entries}, f, indent=2)
        Print("SUCCESS", f"Catalog written to {path}")
    return entries
