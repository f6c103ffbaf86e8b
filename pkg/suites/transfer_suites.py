"""
theorem31, prop31, theorem32 and prop32: the transferred codifferential
squares to zero, and F is a morphism back to the source.

The strict suites run on dg instances; the sh suites run on the two-stage
transferred-sh instance, first re-checking that its source satisfies the
sh law. Every suite also checks that the transferred data commutes with
renumbering the legs of a graph.
"""

from fractions import Fraction
from typing import List, Optional, Tuple

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from algebra.bimodule import FreeElement, SigmaBimodule, decoration_tuples, relabel
from algebra.exactlinalg import Vec
from algebra.properad import check_sh
from algebra.reports import CheckRecord, failed, passed
from algebra.transfer import TransferResult, check_codifferential, check_morphism, transferred_coderivation
from combinatorics.catalog import graphs_up_to
from combinatorics.graphcore import Graph, corolla, graph_to_json, shape_label
from instances.base import BuiltInstance
from suites import register_suite
from suites.base import SuiteOptions, map_checks, per_instance

PARTIAL_EQUIVARIANT = "partial_{sigma G} = sigma partial_G"
F_EQUIVARIANT = "F_k(sigma G) = sigma F_k(G)"
SH_SOURCE = "source: sum_{H in G} mu_{G/H} mu_H = 0"

Swap = Tuple[List[int], List[int]]


def leg_swap(G: Graph) -> Optional[Swap]:
    """Exchange legs 1 and 2 on the outputs, or on the inputs when there is one output."""
    outs, ins = list(range(1, G.m + 1)), list(range(1, G.n + 1))
    if G.m >= 2:
        outs[0], outs[1] = 2, 1
    elif G.n >= 2:
        ins[0], ins[1] = 2, 1
    else:
        return None
    return outs, ins


def _swapped(G: Graph, swap: Swap) -> Graph:
    outs, ins = swap
    return G.relabeled({f: outs[l - 1] for f, l in G.out_labels.items()},
                       {f: ins[l - 1] for f, l in G.in_labels.items()})


def _on_corolla(bm: SigmaBimodule, G: Graph, vec: Vec) -> FreeElement:
    C = corolla(G.m, G.n)
    return FreeElement(bm, {(C, (x,)): Fraction(c) for x, c in vec.items()}, shift=1)


def partial_equivariance(result: TransferResult, G: Graph, limit: int, rng) -> List[CheckRecord]:
    swap = leg_swap(G)
    if swap is None or G.size < 2:
        return []
    E, engine = result.context.target, result.engine
    H = _swapped(G, swap)
    label = shape_label(G)
    count = 0
    for decs in decoration_tuples(E, G, limit, rng):
        count += 1
        lhs = _on_corolla(E, H, engine.partial_G(H, decs))
        rhs = relabel(_on_corolla(E, G, engine.partial_G(G, decs)), *swap)
        if lhs != rhs:
            return [failed(label, PARTIAL_EQUIVARIANT, {"graph": graph_to_json(G), "decorations": list(decs),
                                                        "swap": [list(p) for p in swap]})]
    return [passed(label, PARTIAL_EQUIVARIANT, f"{count} decorations")]


def morphism_equivariance(result: TransferResult, G: Graph, limit: int, rng) -> List[CheckRecord]:
    swap = leg_swap(G)
    if swap is None:
        return []
    engine = result.engine
    H = _swapped(G, swap)
    label = shape_label(G)
    count = 0
    for decs in decoration_tuples(result.context.target, G, limit, rng):
        count += 1
        for k in range(1, G.size + 1):
            if engine.F_apply(H, decs, k) != relabel(engine.F_apply(G, decs, k), *swap):
                return [failed(label, F_EQUIVARIANT, {"graph": graph_to_json(G), "decorations": list(decs),
                                                      "level": k, "swap": [list(p) for p in swap]})]
    return [passed(label, F_EQUIVARIANT, f"{count} decorations")]


class TransferSuite:
    """
    One of the four transfer suites.

    Args:
        name: Suite name
        morphism: Check F instead of the codifferential
        sh: Run on sh instances with the sh bound
    """

    def __init__(self, name: str, morphism: bool, sh: bool):
        self.name = name
        self.morphism = morphism
        self.sh = sh

    def _bound(self, options: SuiteOptions) -> int:
        if self.sh:
            return options.bound("max_vertices_sh", 4)
        return options.bound("max_vertices_strict", 4)

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        bound = self._bound(options)

        def check(built: BuiltInstance) -> List[CheckRecord]:
            ctx = built.context
            records: List[CheckRecord] = []
            if self.sh:
                source = built.source
                gate = check_sh(source, bound, options.limit, options.rng())
                records.extend(CheckRecord(r.shape, SH_SOURCE, r.passed, r.witness, r.detail) for r in gate)
                if not all(r.passed for r in gate):
                    return records
            arities = ctx.source.check_arities
            graphs = graphs_up_to(bound, arities)

            def one(G: Graph) -> List[CheckRecord]:
                # one engine per graph, its memo tables are not shared between threads
                local = transferred_coderivation(ctx, bound, arities)
                if self.morphism:
                    out = check_morphism(local, [G], options.limit, options.rng(G.size))
                    return out + morphism_equivariance(local, G, options.limit, options.rng(G.size))
                out = check_codifferential(local, [G], options.limit, options.rng(G.size))
                return out + partial_equivariance(local, G, options.limit, options.rng(G.size))

            return records + map_checks(one, graphs, options.threads)

        defaults = ["transferred-sh"] if self.sh else ["endomorphism-dga", "commutative-properad"]
        return per_instance(options, self.name, defaults, check)


@register_suite("theorem31")
class StrictCodifferentialSuiteFactory:
    @staticmethod
    def create(config: dict) -> TransferSuite:
        return TransferSuite("theorem31", morphism=False, sh=False)


@register_suite("prop31")
class StrictMorphismSuiteFactory:
    @staticmethod
    def create(config: dict) -> TransferSuite:
        return TransferSuite("prop31", morphism=True, sh=False)


@register_suite("theorem32")
class ShCodifferentialSuiteFactory:
    @staticmethod
    def create(config: dict) -> TransferSuite:
        return TransferSuite("theorem32", morphism=False, sh=True)


@register_suite("prop32")
class ShMorphismSuiteFactory:
    @staticmethod
    def create(config: dict) -> TransferSuite:
        return TransferSuite("prop32", morphism=True, sh=True)
