"""
coassoc-example and bar-square: the cocomposition on the 3-vertex example,
and the bar codifferential squaring to zero.
"""

from fractions import Fraction
from typing import List

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from algebra.bimodule import SigmaBimodule, decoration_tuples, make_component, random_element
from algebra.exactlinalg import GradedSpace, format_scalar
from algebra.properad import (
    BarFamily, Pieces, coderivation_law_defect, coderivation_square, check_sh, iterated_cocomposition,
    strict_as_sh,
)
from algebra.reports import CheckRecord, failed, passed
from combinatorics.catalog import graphs_up_to
from combinatorics.graphcore import Graph, graph_to_json, shape_label
from combinatorics.reference_graphs import three_vertex
from instances.base import BuiltInstance
from suites import register_suite
from suites.base import SuiteOptions, map_checks, per_instance


def point_bimodule(G: Graph) -> SigmaBimodule:
    """One degree-0 element 'x' in every biarity occurring in G."""
    space = GradedSpace((("x", 0),))
    return SigmaBimodule({a: make_component(a, space) for a in {G.arity(v) for v in G.vertices}}, "point")


def describe_pieces(pieces: Pieces) -> list:
    return [[[list(H.vertices) for H, _ in key], format_scalar(c)] for key, c in pieces.items()]


def coassociativity_example() -> List[CheckRecord]:
    G = three_vertex()
    bm = point_bimodule(G)
    decs = ("x",) * G.size
    label = shape_label(G)
    records = []

    left = iterated_cocomposition(bm, G, decs, 0)
    singletons = [tuple(H.vertices) for key in left for H, _ in key]
    ok = (len(left) == 1 and list(left.values()) == [Fraction(2)]
          and singletons == [(v,) for v in G.vertices])
    identity = "(Delta, Id) Delta = 2 (v1 | v2 | v3)"
    records.append(passed(label, identity) if ok
                   else failed(label, identity, {"graph": graph_to_json(G), "value": describe_pieces(left)}))

    right = iterated_cocomposition(bm, G, decs, 1)
    identity = "(Id, Delta) Delta = 0"
    records.append(passed(label, identity) if not right
                   else failed(label, identity, {"graph": graph_to_json(G), "value": describe_pieces(right)}))

    tilde = iterated_cocomposition(bm, G, decs, 0, tilde=True)
    identity = "(Delta~, Id) Delta~ = 0"
    records.append(passed(label, identity) if not tilde
                   else failed(label, identity, {"graph": graph_to_json(G), "value": describe_pieces(tilde)}))
    return records


class CoassociativitySuite:
    name = "coassoc-example"

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        return coassociativity_example()


FULL_SQUARE = "(d_F + d_mu)^2 = 0 on the whole cofree element"
LAW = "Delta D = (D, Id) Delta + (Id, D) Delta"


class BarSquareSuite:
    name = "bar-square"

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        bound = options.bound("max_vertices_strict", 4)

        def check(built: BuiltInstance) -> List[CheckRecord]:
            P = built.source
            S = strict_as_sh(P, bound)
            family = BarFamily(P)
            graphs = graphs_up_to(bound, P.check_arities)

            def one(G: Graph) -> List[CheckRecord]:
                rng = options.rng(G.size)
                records = check_sh(S, bound, options.limit, rng, [G])
                label = shape_label(G)
                x = random_element(P.bimodule, G, rng, shift=1)
                square = coderivation_square(family, x).normalized()
                records.append(passed(label, FULL_SQUARE, f"{len(x)} terms") if square.is_zero()
                               else failed(label, FULL_SQUARE, {"element": x.to_json(),
                                                                "value": square.describe()}))
                broken = None
                for decs in decoration_tuples(P.bimodule, G, options.limit, rng)[:8]:
                    defect = coderivation_law_defect(family, G, decs)
                    if defect:
                        broken = {"graph": graph_to_json(G), "decorations": list(decs),
                                  "defect": describe_pieces(defect)}
                        break
                records.append(passed(label, LAW) if broken is None else failed(label, LAW, broken))
                return records

            return map_checks(one, graphs, options.threads)

        return per_instance(options, self.name, ["endomorphism-dga", "table-properad"], check)


@register_suite("coassoc-example")
class CoassociativitySuiteFactory:
    @staticmethod
    def create(config: dict) -> CoassociativitySuite:
        return CoassociativitySuite()


@register_suite("bar-square")
class BarSquareSuiteFactory:
    @staticmethod
    def create(config: dict) -> BarSquareSuite:
        return BarSquareSuite()
