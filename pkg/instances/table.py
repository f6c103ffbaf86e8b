"""
Table properad instances.

Small dg algebras (biarity (1,1) only) given by explicit product tables,
plus loading of arbitrary table properads from a JSON document of the form

    {"bimodule": {"components": {...}}, "properad": {"products": [...], "unit": [...]}}

Builtin tables:
    massey-dga   1 | a, b, e | c, z with d e = c, ab = c, eb = z; the
                 transferred triple product of (a, b, b) is nonzero
    chain-dga    a, b, e | c with d e = c, ab = c; no unit
    idempotent   u with u u = u and zero differential
"""

from typing import Any, Dict, Optional

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import Print, load_json
from algebra.bimodule import Arity, make_bimodule, parse_arity
from algebra.exactlinalg import GradedMap, cohomology_sdr, map_from_json
from algebra.properad import Properad, check_associativity, check_derivation, properad_from_json
from algebra.transfer import TransferContext, context_from_reductions
from instances import build_instance, register_instance
from instances.base import BuiltInstance, InstanceError, InstanceSpec, resolve_parameters

BUILTIN_TABLES: Dict[str, Dict[str, Any]] = {
    "massey-dga": {
        "bimodule": {"components": {"1,1": {
            "basis": [["1", 0], ["a", 1], ["b", 1], ["e", 1], ["c", 2], ["z", 2]],
            "d": [["e", "c", "1"]],
        }}},
        "properad": {
            "products": [
                ["1", "1", [["1", "1"]]],
                ["1", "a", [["a", "1"]]], ["a", "1", [["a", "1"]]],
                ["1", "b", [["b", "1"]]], ["b", "1", [["b", "1"]]],
                ["1", "e", [["e", "1"]]], ["e", "1", [["e", "1"]]],
                ["1", "c", [["c", "1"]]], ["c", "1", [["c", "1"]]],
                ["1", "z", [["z", "1"]]], ["z", "1", [["z", "1"]]],
                ["a", "b", [["c", "1"]]], ["b", "a", [["c", "-1"]]],
                ["e", "b", [["z", "1"]]], ["b", "e", [["z", "-1"]]],
            ],
            "unit": [["1", "1"]],
            "arities": [[1, 1]],
        },
    },
    "chain-dga": {
        "bimodule": {"components": {"1,1": {
            "basis": [["a", 1], ["b", 1], ["e", 1], ["c", 2]],
            "d": [["e", "c", "1"]],
        }}},
        "properad": {
            "products": [["a", "b", [["c", "1"]]]],
            "arities": [[1, 1]],
        },
    },
    "idempotent": {
        "bimodule": {"components": {"1,1": {"basis": [["u", 0]]}}},
        "properad": {
            "products": [["u", "u", [["u", "1"]]]],
            "unit": [["u", "1"]],
            "arities": [[1, 1]],
        },
    },
}


def table_properad(data: Dict[str, Any], name: str) -> Properad:
    """A validated table properad from a {"bimodule", "properad"} document."""
    if "bimodule" not in data or "properad" not in data:
        raise InstanceError("spec-invalid", "A table document needs 'bimodule' and 'properad' sections")
    bm = make_bimodule(data["bimodule"], name)
    return properad_from_json(data["properad"], bm, name)


class TableInstanceBuilder:
    """Builds a table properad and its componentwise retract onto cohomology."""

    def __init__(self, config: dict):
        self.config = config

    def _document(self, params: Dict[str, Any]) -> Dict[str, Any]:
        if params.get("path"):
            return load_json(Path(params["path"]))
        table = params.get("table", "massey-dga")
        if table not in BUILTIN_TABLES:
            raise InstanceError("spec-invalid", f"Unknown table '{table}'. "
                                                f"Available tables: {', '.join(sorted(BUILTIN_TABLES))}")
        return BUILTIN_TABLES[table]

    def build(self, spec: InstanceSpec) -> BuiltInstance:
        params = resolve_parameters(self.config, spec)
        name = params.get("name") or (Path(params["path"]).stem if params.get("path") else params.get("table", "table"))
        P = table_properad(self._document(params), name)

        # a table that is not associative or not a derivation is rejected up front
        broken = [r for r in check_associativity(P) + check_derivation(P) if not r.passed]
        if broken:
            raise InstanceError("spec-invalid", f"Table '{name}' violates {broken[0].identity} on {broken[0].shape}")

        reductions = {}
        for arity in P.bimodule.arities:
            comp = P.bimodule.component(arity)
            reductions[arity] = cohomology_sdr(comp.space, comp.d, params.get("max_cancellations"))
        ctx = context_from_reductions(P, reductions, name=name)
        Print("DEBUG", f"Built table properad {name}: "
                       + ", ".join(f"{a}: {len(r.source)} -> {len(r.space)}" for a, r in sorted(reductions.items())))
        notes = {
            "table": name,
            "dimensions": {f"{m},{n}": [len(r.source), len(r.space)] for (m, n), r in sorted(reductions.items())},
            "side_conditions": {f"{m},{n}": r.side_conditions() for (m, n), r in sorted(reductions.items())},
        }
        return BuiltInstance(spec, P, ctx, notes)


@register_instance("table-properad")
class TableInstanceFactory:
    """Factory for table properad instances."""

    @staticmethod
    def create(config: dict) -> TableInstanceBuilder:
        return TableInstanceBuilder(config)


def table_context(data: Dict[str, Any], name: str) -> TransferContext:
    """
    Retract data supplied by hand: a table document extended with a
    "target" bimodule and per-biarity "f", "g", "h" entry lists.

    f maps the target into the source, g the source onto the target and h
    is the degree -1 homotopy on the source.
    """
    P = table_properad(data, name)
    if "target" not in data:
        raise InstanceError("spec-invalid", "A context document needs a 'target' bimodule")
    E = make_bimodule(data["target"], f"{name}-target")
    maps: Dict[str, Dict[Arity, GradedMap]] = {"f": {}, "g": {}, "h": {}}
    for key, degree in (("f", 0), ("g", 0), ("h", -1)):
        for arity_key, entries in data.get(key, {}).items():
            arity = parse_arity(arity_key)
            if arity not in P.bimodule.components or arity not in E.components:
                raise InstanceError("spec-invalid", f"'{key}' names biarity {arity_key} missing from the bimodules")
            sp, se = P.bimodule.component(arity).space, E.component(arity).space
            source, target = {"f": (se, sp), "g": (sp, se), "h": (sp, sp)}[key]
            maps[key][arity] = map_from_json(entries, source, target, degree=degree)
    return TransferContext(P, E, maps["f"], maps["g"], maps["h"], name).validate()


def load_context(path: Path, config: Optional[dict] = None) -> BuiltInstance:
    """
    An instance from a context file.

    Two forms are read: a hand-written table context (see table_context), or
    a document written by `instance build`, which is rebuilt from its spec
    and must reproduce the stored f, g and h.

    Raises:
        FileNotFoundError: If the file does not exist
        InstanceError: spec-invalid when the document fits neither form
        TransferError: If the retract data violates the transfer hypotheses
    """
    path = Path(path)
    data = load_json(path)
    if "properad" in data:
        ctx = table_context(data, data.get("name") or path.stem)
        spec = InstanceSpec("table-properad", {"path": str(path)})
        return BuiltInstance(spec, ctx.source, ctx, {"context": str(path)})
    if "spec" in data:
        built = build_instance(InstanceSpec.from_json(data["spec"]), config)
        stored = built.to_json()
        for key in ("f", "g", "h"):
            if key in data and data[key] != stored[key]:
                raise InstanceError("spec-invalid", f"'{key}' in {path.name} does not match its spec")
        return built
    raise InstanceError("spec-invalid", f"{path.name} is neither a table context nor an instance document")
