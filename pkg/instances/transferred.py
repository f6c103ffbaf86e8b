"""
Two-stage instances: the output of a strict transfer used as an sh source.

Stage one transfers a strict base instance along a partial retract, which
cancels only some acyclic pairs so the target keeps a nonzero differential.
The transferred family is an sh-properad; it is checked with check_sh up to
its bound and then retracted fully onto cohomology for the second stage.
"""

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import Print
from algebra.exactlinalg import cohomology_sdr
from algebra.properad import check_sh
from algebra.transfer import context_from_reductions, transferred_coderivation
from instances import get_instance_builder, register_instance
from instances.base import BuiltInstance, InstanceError, InstanceSpec, require_int, resolve_parameters

STRICT_BASES = ("endomorphism-dga", "table-properad", "commutative-properad", "truncated-free-properad")


class TransferredInstanceBuilder:
    """Builds an sh-properad by transfer and a second retract from it."""

    def __init__(self, config: dict):
        self.config = config

    def build(self, spec: InstanceSpec) -> BuiltInstance:
        params = resolve_parameters(self.config, spec)
        base_kind = str(params.get("base", "endomorphism-dga"))
        if base_kind not in STRICT_BASES:
            raise InstanceError("spec-invalid", f"Base '{base_kind}' is not a strict instance kind")
        cancellations = require_int(params, "cancellations", 0, 64)
        bound = require_int(params, "bound", 2, 5)

        base = get_instance_builder(base_kind, self.config).build(
            InstanceSpec(base_kind, dict(params.get("base_parameters", {})), spec.seed))
        P = base.source
        partial = {}
        for arity in P.bimodule.arities:
            comp = P.bimodule.component(arity)
            partial[arity] = cohomology_sdr(comp.space, comp.d, cancellations)
        ctx1 = context_from_reductions(P, partial, name=f"{P.name}-partial")
        stage1 = transferred_coderivation(ctx1, bound, P.check_arities)
        S = stage1.as_sh_properad(name=f"{P.name}-sh")

        broken = [r for r in check_sh(S, max_vertices=bound) if not r.passed]
        if broken:
            raise InstanceError("spec-invalid", f"Stage one output is not an sh-properad: "
                                                f"{broken[0].identity} fails on {broken[0].shape}")

        full = {}
        for arity in S.bimodule.arities:
            comp = S.bimodule.component(arity)
            full[arity] = cohomology_sdr(comp.space, comp.d)
        ctx2 = context_from_reductions(S, full, name=f"{S.name}-reduced")
        Print("DEBUG", f"Built {S.name}: " + ", ".join(
            f"{a}: {len(partial[a].source)} -> {len(partial[a].space)} -> {len(full[a].space)}"
            for a in sorted(full)))
        notes = {
            "base": base.to_json()["spec"],
            "cancellations": cancellations,
            "bound": bound,
            "dimensions": {f"{m},{n}": [len(partial[(m, n)].source), len(partial[(m, n)].space), len(r.space)]
                           for (m, n), r in sorted(full.items())},
        }
        return BuiltInstance(spec, S, ctx2, notes)


@register_instance("transferred-sh")
class TransferredInstanceFactory:
    """Factory for two-stage sh instances."""

    @staticmethod
    def create(config: dict) -> TransferredInstanceBuilder:
        return TransferredInstanceBuilder(config)
