"""
Homotopy transfer of (sh-)properad structures along deformation retracts.

Given a dg properad P (or an sh-properad) and per-biarity retract data
f: E -> P, g: P -> E, h: P -> P with fg - Id = dh + hd, the engine builds

    theta_t     nested compositions along a contraction tree t, with h~ on
                every internal edge and the identity on leaves,
    theta_G     the sum of theta_t over T_G (strict) or T^_G (sh source),
    partial_G   g theta_G f^k, and the shifted differential on corollas,
    F_G         h theta_G f^k, and f on corollas,

together with the identities those maps satisfy. All maps act on shifted
decorations; the shifted versions of f, g, h and d come from
exactlinalg.shifted_map, so f~ = f, g~ = g, h~ = -h and d~ = -d.

Usage:
    ctx = TransferContext(P, E, f, g, h).validate()
    engine = TransferEngine(ctx)
    value = engine.partial_G(G, decorations)
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

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
    Arity, FreeElement, Key, SigmaBimodule, decoration_degrees, decoration_tuples, expand,
    free_differential, koszul_sign, make_component,
)
from algebra.exactlinalg import (
    GradedMap, Reduction, Vec, add_into, compose, format_scalar, identity, shifted_map,
)
from algebra.properad import (
    BarFamily, CoderivationFamily, Properad, PropertyError, ShProperad, _induced, apply_family,
    check_sh, contract_with,
)
from algebra.reports import CheckRecord, failed, passed
from combinatorics.graphcore import Graph, enumerate_splittings, graph_to_json, merge_id, shape_label
from combinatorics.trees import (
    ContractionTree, enumerate_T, enumerate_That, realizes, split_at_edge,
)


class TransferError(DomainError):
    """Retract data that does not satisfy the transfer hypotheses."""


Source = Union[Properad, ShProperad]


# =============================================================================
# Context
# =============================================================================

@dataclass(frozen=True, eq=False)
class TransferContext:
    """
    Retract data between a source P and a target bimodule E.

    Attributes:
        source: Strict Properad or ShProperad P
        target: Bimodule E
        f: Per biarity E(m,n) -> P(m,n), degree 0
        g: Per biarity P(m,n) -> E(m,n), degree 0
        h: Per biarity P(m,n) -> P(m,n), degree -1
    """

    source: Source
    target: SigmaBimodule
    f: Dict[Arity, GradedMap]
    g: Dict[Arity, GradedMap]
    h: Dict[Arity, GradedMap]
    name: str = ""

    @property
    def strict(self) -> bool:
        return isinstance(self.source, Properad)

    @property
    def source_bimodule(self) -> SigmaBimodule:
        return self.source.bimodule

    @property
    def arities(self) -> List[Arity]:
        return sorted(self.f)

    @cached_property
    def f_hat(self) -> Dict[Arity, GradedMap]:
        return {a: shifted_map(m, 1) for a, m in self.f.items()}

    @cached_property
    def g_hat(self) -> Dict[Arity, GradedMap]:
        return {a: shifted_map(m, 1) for a, m in self.g.items()}

    @cached_property
    def h_hat(self) -> Dict[Arity, GradedMap]:
        return {a: shifted_map(m, 1) for a, m in self.h.items()}

    def validate(self) -> "TransferContext":
        """
        Check the hypotheses per biarity.

        Raises:
            TransferError: space-mismatch, degree-mismatch,
                homotopy-identity-violated, not-a-chain-map or not-equivariant
        """
        P, E = self.source_bimodule, self.target
        if set(self.f) != set(P.arities) or set(self.g) != set(P.arities) or set(self.h) != set(P.arities) \
                or set(E.arities) != set(P.arities):
            raise TransferError("space-mismatch", "f, g, h, P and E must cover the same biarities")
        for arity in P.arities:
            cp, ce = P.component(arity), E.component(arity)
            f, g, h = self.f[arity], self.g[arity], self.h[arity]
            if f.source != ce.space or f.target != cp.space or g.source != cp.space or g.target != ce.space \
                    or h.source != cp.space or h.target != cp.space:
                raise TransferError("space-mismatch", f"Maps at {arity} do not fit the components")
            if (f.degree != 0 and not f.is_zero()) or (g.degree != 0 and not g.is_zero()) \
                    or (h.degree != -1 and not h.is_zero()):
                raise TransferError("degree-mismatch", f"Maps at {arity} have degrees "
                                                       f"{f.degree}, {g.degree}, {h.degree}")
            d = cp.d
            if compose(f, g) - identity(cp.space) != compose(d, h) + compose(h, d):
                raise TransferError("homotopy-identity-violated", f"fg - Id != dh + hd at {arity}")
            if compose(d, f) != compose(f, ce.d) or compose(ce.d, g) != compose(g, d):
                raise TransferError("not-a-chain-map", f"f or g does not commute with d at {arity}")
            for sp, se in zip(cp.left + cp.right, ce.left + ce.right):
                if compose(f, se) != compose(sp, f) or compose(g, sp) != compose(se, g) \
                        or compose(h, sp) != compose(sp, h):
                    raise TransferError("not-equivariant", f"Retract data at {arity} is not equivariant")
        return self


def context_from_reductions(source: Source, reductions: Mapping[Arity, Reduction], name: str = "") -> TransferContext:
    """
    Context whose target components are the reduction spaces, with d_E the
    reduced differential and actions g s f.
    """
    P = source.bimodule
    components = {}
    for arity, red in reductions.items():
        cp = P.component(arity)
        left = [compose(red.g, compose(s, red.f)) for s in cp.left]
        right = [compose(red.g, compose(s, red.f)) for s in cp.right]
        components[arity] = make_component(arity, red.space, red.differential, left, right)
    E = SigmaBimodule(components, name or f"{P.name}-reduced").validate()
    return TransferContext(
        source, E,
        {a: r.f for a, r in reductions.items()},
        {a: r.g for a, r in reductions.items()},
        {a: r.h for a, r in reductions.items()},
        name,
    ).validate()


# =============================================================================
# Engine
# =============================================================================

class TransferEngine:
    """
    Evaluates theta, partial and F on decorated graphs for one context.

    Memo tables live on the engine; create one engine per independent check.
    """

    def __init__(self, ctx: TransferContext):
        self.ctx = ctx
        self.P = ctx.source_bimodule
        self.E = ctx.target
        self.family: CoderivationFamily = BarFamily(ctx.source) if ctx.strict else ctx.source.family
        self._theta: Dict[Tuple[Graph, Tuple[str, ...], ContractionTree], Vec] = {}
        self._trees: Dict[Graph, List[ContractionTree]] = {}
        self._partial: Dict[Tuple[Graph, Tuple[str, ...]], Vec] = {}
        self._f_one: Dict[Tuple[Graph, Tuple[str, ...]], Vec] = {}

    # ------------------------------------------------------------ utilities

    def trees(self, G: Graph) -> List[ContractionTree]:
        """T_G for a strict source, T^_G for an sh source."""
        if G not in self._trees:
            self._trees[G] = enumerate_T(G) if self.ctx.strict else enumerate_That(G)
        return self._trees[G]

    def _apply(self, maps: Dict[Arity, GradedMap], arity: Arity, vec: Vec) -> Vec:
        phi = maps.get(arity)
        if phi is None:
            return {}
        return phi.apply(vec)

    def _check_degree(self, bm: SigmaBimodule, arity: Arity, vec: Vec, expected: int, what: str) -> None:
        for x in vec:
            if bm.degree(arity, x, 1) != expected:
                raise TransferError("degree-mismatch", f"{what} produced '{x}' of degree "
                                                       f"{bm.degree(arity, x, 1)}, expected {expected}")

    # ----------------------------------------------------------------- theta

    def _theta_t(self, G: Graph, decs: Tuple[str, ...], t: ContractionTree) -> Vec:
        key = (G, decs, t)
        if key in self._theta:
            return self._theta[key]
        blocks = [child.leaves for child in t.children]
        Q = G.quotient(blocks)
        position = {v: i for i, v in enumerate(Q.vertices)}
        ordered = sorted(t.children, key=lambda child: position[merge_id(child.leaves)])
        index = {v: i for i, v in enumerate(G.vertices)}
        order: List[int] = []
        vectors: List[Vec] = []
        for child in ordered:
            idxs = [index[v] for v in natsorted(child.leaves)]
            order.extend(idxs)
            sub = tuple(decs[i] for i in idxs)
            if child.is_leaf:
                vectors.append({sub[0]: Fraction(1)})
            else:
                vectors.append(self._h_theta(_induced(G, frozenset(child.leaves)), sub, child))
            if not vectors[-1]:
                self._theta[key] = {}
                return {}
        sign = koszul_sign(decoration_degrees(self.P, G, decs, 1), order)
        out: Vec = {}
        for qdecs, c in expand(vectors, Fraction(sign)):
            add_into(out, self.family.evaluate(Q, qdecs), c)
        self._theta[key] = out
        return out

    def _h_theta(self, H: Graph, decs: Tuple[str, ...], t: ContractionTree) -> Vec:
        return self._apply(self.ctx.h_hat, (H.m, H.n), self._theta_t(H, decs, t))

    def _require_tree(self, G: Graph, t: ContractionTree) -> None:
        if not realizes(G, t, binary=self.ctx.strict):
            raise TransferError("invalid-tree", f"{t.label()} is not a contraction tree of {shape_label(G)}")

    def theta_t(self, G: Graph, decs: Sequence[str], t: ContractionTree) -> Vec:
        """theta_t on one P[1]-decorated graph; degree 1."""
        self._require_tree(G, t)
        decs = tuple(decs)
        out = self._theta_t(G, decs, t)
        self._check_degree(self.P, (G.m, G.n), out, sum(decoration_degrees(self.P, G, decs, 1)) + 1, "theta_t")
        return out

    def theta_variant(self, G: Graph, decs: Sequence[str], t: ContractionTree,
                      edge: FrozenSet[str], variant: str = "Id") -> Vec:
        """
        theta_t with the identity (variant 'Id') or f~g~ (variant 'circ')
        in place of h~ on the internal edge `edge`.
        """
        if variant not in ("Id", "circ"):
            raise TransferError("bad-variant", f"Unknown variant '{variant}', expected Id or circ")
        self._require_tree(G, t)
        t_r, t_l, H = split_at_edge(G, t, edge)

        def lower(Hg: Graph, hdecs: Tuple[str, ...]) -> Vec:
            value = self._theta_t(Hg, hdecs, t_r)
            if variant == "circ":
                arity = (Hg.m, Hg.n)
                value = self._apply(self.ctx.f_hat, arity, self._apply(self.ctx.g_hat, arity, value))
            return value

        out: Vec = {}
        for (Q, qdecs), c in contract_with(self.P, lower, G, tuple(decs), H.vertices, 1).items():
            add_into(out, self._theta_t(Q, qdecs, t_l), c)
        return out

    def theta_G(self, G: Graph, decs: Sequence[str]) -> Vec:
        decs = tuple(decs)
        out: Vec = {}
        for t in self.trees(G):
            add_into(out, self._theta_t(G, decs, t))
        self._check_degree(self.P, (G.m, G.n), out, sum(decoration_degrees(self.P, G, decs, 1)) + 1, "theta_G")
        return out

    def lemma3_sum(self, G: Graph, decs: Sequence[str]) -> Vec:
        """Sum over binary trees and their internal edges of theta^Id; zero."""
        out: Vec = {}
        for t in enumerate_T(G):
            for edge in t.internal_edges():
                add_into(out, self.theta_variant(G, decs, t, edge, "Id"))
        return out

    def eq1_defect(self, G: Graph, decs: Sequence[str]) -> Vec:
        """d~ theta_G + theta_G d~_F + sum theta^circ; zero for a strict source."""
        decs = tuple(decs)
        arity = (G.m, G.n)
        d_hat = self.P.component(arity).differential(1)
        out = d_hat.apply(self.theta_G(G, decs))
        for (_, decs2), c in free_differential(FreeElement.single(self.P, G, decs, shift=1)).terms.items():
            add_into(out, self.theta_G(G, decs2), c)
        for t in enumerate_T(G):
            for edge in t.internal_edges():
                add_into(out, self.theta_variant(G, decs, t, edge, "circ"))
        return out

    # --------------------------------------------------------------- partial

    def _f_tensor(self, G: Graph, decs: Tuple[str, ...]) -> List[Tuple[Tuple[str, ...], Fraction]]:
        vectors = [self._apply(self.ctx.f_hat, G.arity(v), {e: Fraction(1)}) for v, e in zip(G.vertices, decs)]
        return list(expand(vectors))

    def partial_G(self, G: Graph, decs: Sequence[str]) -> Vec:
        """
        The transferred structure on one E[1]-decorated graph: the shifted
        differential of E on a corolla, g~ theta_G f~^k otherwise.
        """
        decs = tuple(decs)
        key = (G, decs)
        if key in self._partial:
            return self._partial[key]
        arity = (G.m, G.n)
        if G.size == 1:
            out = self.E.component(arity).differential(1).image(decs[0])
        else:
            inner: Vec = {}
            for pdecs, c in self._f_tensor(G, decs):
                add_into(inner, self.theta_G(G, pdecs), c)
            out = self._apply(self.ctx.g_hat, arity, inner)
            self._check_degree(self.E, arity, out, sum(decoration_degrees(self.E, G, decs, 1)) + 1, "partial_G")
        self._partial[key] = out
        return out

    # ------------------------------------------------------------- morphism

    def F_one(self, G: Graph, decs: Sequence[str]) -> Vec:
        """F_G: f on a corolla, h~ theta_G f~^k otherwise; degree 0."""
        decs = tuple(decs)
        key = (G, decs)
        if key in self._f_one:
            return self._f_one[key]
        arity = (G.m, G.n)
        if G.size == 1:
            out = self._apply(self.ctx.f_hat, arity, {decs[0]: Fraction(1)})
        else:
            inner: Vec = {}
            for pdecs, c in self._f_tensor(G, decs):
                add_into(inner, self.theta_G(G, pdecs), c)
            out = self._apply(self.ctx.h_hat, arity, inner)
        self._f_one[key] = out
        return out

    def F_apply(self, G: Graph, decs: Sequence[str], k: int) -> FreeElement:
        """
        Level k of the induced morphism: for every splitting of G into k
        blocks, F_G on each block, placed on the quotient graph.

        Raises:
            GraphError: k-out-of-range
        """
        decs = tuple(decs)
        degrees = decoration_degrees(self.E, G, decs, 1)
        index = {v: i for i, v in enumerate(G.vertices)}
        out: Dict[Key, Fraction] = {}
        for s in enumerate_splittings(G, k):
            order = [index[v] for b in s.blocks for v in b]
            sign = koszul_sign(degrees, order)
            vectors = []
            for b in s.blocks:
                sub = tuple(decs[index[v]] for v in b)
                vectors.append(self.F_one(_induced(G, frozenset(b)), sub))
            for qdecs, c in expand(vectors, Fraction(sign)):
                key = (s.quotient, qdecs)
                out[key] = out.get(key, Fraction(0)) + c
        return FreeElement(self.P, out, shift=1)

    def morphism_defect(self, G: Graph, decs: Sequence[str], family: CoderivationFamily) -> Vec:
        """(F d_E)_1 - (d_P F)_1 on one E[1]-decorated graph."""
        decs = tuple(decs)
        out: Vec = {}
        for (Q, qdecs), c in apply_family(family, G, decs, 1).items():
            add_into(out, self.F_one(Q, qdecs), c)
        top = 2 if self.ctx.strict else G.size
        for level in range(1, min(top, G.size) + 1):
            for (Q, qdecs), c in self.F_apply(G, decs, level).terms.items():
                add_into(out, self.family.evaluate(Q, qdecs), -c)
        return out


# =============================================================================
# Transferred structure
# =============================================================================

class TransferredFamily:
    """The family partial_G on E[1], known up to `bound` vertices."""

    degree = 1

    def __init__(self, engine: TransferEngine, bound: int):
        self.engine = engine
        self.bimodule = engine.E
        self.bound = bound

    def evaluate(self, graph: Graph, decorations: Tuple[str, ...]) -> Vec:
        if graph.size > self.bound:
            raise PropertyError("missing-family-entry", f"The transferred family is only known up to "
                                                        f"{self.bound} vertices")
        return self.engine.partial_G(graph, decorations)


@dataclass
class TransferResult:
    """
    Output of a transfer: the family on E[1] and the morphism back to P.

    Attributes:
        context: The validated context
        family: partial_G for graphs up to `bound` vertices
        bound: Largest graph size the family is claimed for
    """

    context: TransferContext
    family: TransferredFamily
    bound: int
    arities: Tuple[Arity, ...] = ()

    @property
    def engine(self) -> TransferEngine:
        return self.family.engine

    def morphism(self, G: Graph, decs: Sequence[str], k: int = 1) -> FreeElement:
        return self.engine.F_apply(G, decs, k)

    def as_sh_properad(self, name: str = "") -> ShProperad:
        return ShProperad(self.context.target, self.family, self.bound,
                          name or f"{self.context.name}-transferred", self.arities)

    def table(self, graphs: Sequence[Graph], limit: int = 48,
              rng: Optional[np.random.Generator] = None) -> List[dict]:
        """Nonzero values of the family on basis decorations, for export."""
        rows = []
        for G in graphs:
            for decs in decoration_tuples(self.context.target, G, limit, rng):
                value = self.family.evaluate(G, decs)
                if value:
                    rows.append({
                        "shape": shape_label(G),
                        "graph": graph_to_json(G),
                        "decorations": list(decs),
                        "value": [[x, format_scalar(c)] for x, c in sorted(value.items())],
                    })
        return rows


def transferred_coderivation(ctx: TransferContext, bound: int, arities: Sequence[Arity] = ()) -> TransferResult:
    """The transferred codifferential on E[1] up to `bound` vertices."""
    ctx.validate()
    engine = TransferEngine(ctx)
    Print("DEBUG", f"Transfer {ctx.name or 'context'}: {'strict' if ctx.strict else 'sh'} source, bound {bound}")
    return TransferResult(ctx, TransferredFamily(engine, bound), bound, tuple(arities))


# =============================================================================
# Module-level operations
# =============================================================================

def theta_t(ctx: TransferContext, G: Graph, decs: Sequence[str], t: ContractionTree) -> Vec:
    return TransferEngine(ctx).theta_t(G, decs, t)


def theta_variants(ctx: TransferContext, G: Graph, decs: Sequence[str], t: ContractionTree,
                   edge, variant: str = "Id") -> Vec:
    return TransferEngine(ctx).theta_variant(G, decs, t, frozenset(edge), variant)


def theta_G(ctx: TransferContext, G: Graph, decs: Sequence[str]) -> Vec:
    return TransferEngine(ctx).theta_G(G, decs)


def lemma3_sum(ctx: TransferContext, G: Graph, decs: Sequence[str]) -> Vec:
    return TransferEngine(ctx).lemma3_sum(G, decs)


def partial_G(ctx: TransferContext, G: Graph, decs: Sequence[str]) -> Vec:
    return TransferEngine(ctx).partial_G(G, decs)


def F_apply(ctx: TransferContext, G: Graph, decs: Sequence[str], k: int) -> FreeElement:
    return TransferEngine(ctx).F_apply(G, decs, k)


# =============================================================================
# Checks
# =============================================================================

def check_codifferential(result: TransferResult, graphs: Sequence[Graph], limit: int = 48,
                         rng: Optional[np.random.Generator] = None) -> List[CheckRecord]:
    """sum_{H in G} partial_{G/H} partial_H = 0 per graph."""
    records = check_sh(result.as_sh_properad(), limit=limit, rng=rng, graphs=list(graphs))
    return [CheckRecord(r.shape, "sum_{H in G} partial_{G/H} partial_H = 0", r.passed, r.witness, r.detail)
            for r in records]


def check_morphism(result: TransferResult, graphs: Sequence[Graph], limit: int = 48,
                   rng: Optional[np.random.Generator] = None) -> List[CheckRecord]:
    """(F d_E)_1 = (d_P F)_1 per graph and basis decoration."""
    identity_text = "(F partial_E)_1 = (partial_P F)_1"
    records = []
    for G in graphs:
        engine = TransferEngine(result.context)
        family = TransferredFamily(engine, result.bound)
        failure = None
        count = 0
        for decs in decoration_tuples(result.context.target, G, limit, rng):
            count += 1
            defect = engine.morphism_defect(G, decs, family)
            if defect:
                failure = {"graph": graph_to_json(G), "decorations": list(decs),
                           "defect": {x: format_scalar(c) for x, c in sorted(defect.items())}}
                break
        records.append(passed(shape_label(G), identity_text, f"{count} decorations") if failure is None
                       else failed(shape_label(G), identity_text, failure))
    return records


def _random_decorations(bm: SigmaBimodule, G: Graph, rng: np.random.Generator) -> Tuple[str, ...]:
    bases = [bm.basis(G.arity(v)) for v in G.vertices]
    return tuple(b[int(rng.integers(len(b)))] for b in bases)


def check_lemma3(ctx: TransferContext, graphs: Sequence[Graph], seeds: int = 10) -> List[CheckRecord]:
    """Sum of theta^Id over trees and internal edges vanishes; random decorations per seed."""
    identity_text = "sum_{t in T_G} sum_{e in e(t)} theta^Id_{t,e} = 0"
    records = []
    for G in graphs:
        if any(not ctx.source_bimodule.basis(G.arity(v)) for v in G.vertices):
            continue
        engine = TransferEngine(ctx)
        failure = None
        for seed in range(seeds):
            decs = _random_decorations(ctx.source_bimodule, G, np.random.default_rng(seed))
            value = engine.lemma3_sum(G, decs)
            if value:
                failure = {"graph": graph_to_json(G), "decorations": list(decs), "seed": seed,
                           "value": {x: format_scalar(c) for x, c in sorted(value.items())}}
                break
        records.append(passed(shape_label(G), identity_text, f"{seeds} seeds") if failure is None
                       else failed(shape_label(G), identity_text, failure))
    return records


def check_eq1(ctx: TransferContext, graphs: Sequence[Graph], seeds: int = 10) -> List[CheckRecord]:
    """d theta_G + theta_G d_F = -sum theta^circ; random decorations per seed."""
    identity_text = "d theta_G + theta_G d_FP = -sum_{t,e} theta^circ_{t,e}"
    records = []
    for G in graphs:
        if any(not ctx.source_bimodule.basis(G.arity(v)) for v in G.vertices):
            continue
        engine = TransferEngine(ctx)
        failure = None
        for seed in range(seeds):
            decs = _random_decorations(ctx.source_bimodule, G, np.random.default_rng(seed))
            value = engine.eq1_defect(G, decs)
            if value:
                failure = {"graph": graph_to_json(G), "decorations": list(decs), "seed": seed,
                           "value": {x: format_scalar(c) for x, c in sorted(value.items())}}
                break
        records.append(passed(shape_label(G), identity_text, f"{seeds} seeds") if failure is None
                       else failed(shape_label(G), identity_text, failure))
    return records
