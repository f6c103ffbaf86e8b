"""
Small named graphs used as fixed examples by the suites and the tests.
"""

from typing import Dict, Tuple

from combinatorics.graphcore import IN, OUT, Graph, RawGraph, graph_from_edges, line_graph


def two_vertex() -> Graph:
    """v2 -> v1."""
    return line_graph(2)


def three_vertex() -> Graph:
    """v2 -> v1 <- v3: two binary contraction trees, three general ones."""
    return graph_from_edges([("v2", "v1"), ("v3", "v1")], out_legs=["v1"], in_legs=["v2", "v3"])


def chorded_line() -> Graph:
    """v3 -> v2 -> v1 together with v3 -> v1."""
    return graph_from_edges([("v3", "v2"), ("v3", "v1"), ("v2", "v1")], out_legs=["v1"], in_legs=["v3"])


def chorded_diamond() -> Graph:
    """
    v1 -> v2, v1 -> v3, v2 -> v4, v3 -> v4 and the chord v1 -> v4.

    Contracting v3 -> v4 is admissible; contracting the chord is not, since
    v2 and v3 then sit on 2-cycles with the merged vertex.
    """
    return graph_from_edges(
        [("v1", "v2"), ("v1", "v3"), ("v2", "v4"), ("v3", "v4"), ("v1", "v4")],
        out_legs=["v4"], in_legs=["v1"],
    )


def diamond() -> Graph:
    """v4 -> v2, v4 -> v3, v2 -> v1, v3 -> v1."""
    return graph_from_edges(
        [("v4", "v2"), ("v4", "v3"), ("v2", "v1"), ("v3", "v1")],
        out_legs=["v1"], in_legs=["v4"],
    )


def ladder(k: int) -> Graph:
    """The linear graph with k vertices in G(1,1)."""
    return line_graph(k)


def twelve_flag() -> Tuple[RawGraph, Dict[str, str], Dict[str, int], Dict[str, int]]:
    """
    Flags a..l, involution (be)(cf)(di)(gh)(kl), blocks {a,b,c,d},
    {e,f,g}, {h,i,j,k,l}. The edge (kl) is a loop, so with any direction the
    graph has a directed cycle.
    """
    raw = RawGraph(
        flags=tuple("abcdefghijkl"),
        pairs=(("b", "e"), ("c", "f"), ("d", "i"), ("g", "h"), ("k", "l")),
        blocks=(("v1", tuple("abcd")), ("v2", tuple("efg")), ("v3", tuple("hijkl"))),
    )
    direction = {
        "a": IN, "b": OUT, "c": OUT, "d": OUT,
        "e": IN, "f": IN, "g": OUT,
        "h": IN, "i": IN, "j": OUT, "k": OUT, "l": IN,
    }
    return raw, direction, {"j": 1}, {"a": 1}
