#!/usr/bin/env python3
"""
properad-htt: exact verification of homotopy transfer for properads.

This is the orchestrator that wires graphs, contraction trees, properads,
instance builders and verification suites into one command-line tool.

Architecture:
- Factory registries for instance kinds and verification suites
- Protocol-based contracts (InstanceBuilder, Suite, CoderivationFamily)
- Exact rational arithmetic end to end; randomness only through seeded rngs

Usage:
    from properad_htt import VerificationPipeline

    pipeline = VerificationPipeline()
    report = pipeline.run_suite("lemma21")

Or from command line:
    python properad_htt.py suite run --name lemma21
    python properad_htt.py transfer verify --instance endomorphism-dga --max-vertices 3
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from utilities import DomainError, Print, load_json, set_debug, thread_budget
from algebra.properad import Properad, check_associativity, check_derivation, check_sh, check_unit, strict_as_sh
from algebra.reports import Report
from algebra.transfer import check_codifferential, check_eq1, check_lemma3, check_morphism, transferred_coderivation
from combinatorics.catalog import dump_catalog, graphs_up_to
from combinatorics.graphcore import (
    GraphValidationError, canonical_form, contract_thick_edge, graph_from_json, graph_to_json, is_admissible,
    raw_from_json, shape_label, thick_edge_by_ends, validate,
)
from combinatorics.trees import enumerate_T, enumerate_That, sort_trees
from instances import build_instance
from instances.base import BuiltInstance, InstanceSpec
from instances.table import load_context, table_properad
from suites import SUITE_REGISTRY, run_suite
from suites.base import SuiteOptions
from suites.merkulov import line_checks
from suites.tree_laws import partner_check


class VerificationPipeline:
    """
    Main orchestrator for properad transfer verification.

    Every command of the CLI is one method here; methods return either a
    JSON-ready dictionary or a Report.

    Attributes:
        config: Loaded configuration dictionary
        threads: Worker threads granted to suites
    """

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initialize pipeline with configuration.

        Args:
            config_path: Path to config.json. If None, uses default location.
        """
        self.config = self._load_config(config_path)
        set_debug(bool(self.config.get("logging", {}).get("debug", False)))
        parallelism = self.config.get("parallelism", {})
        self.threads = thread_budget(parallelism.get("threads"),
                                     parallelism.get("env_var", "PROPERAD_HTT_THREADS"))

    def _load_config(self, config_path: Optional[Path]) -> dict:
        """Load configuration from JSON file."""
        if config_path is None:
            # Default: look for config relative to this file
            config_path = Path(__file__).parent / "config" / "config.json"

        config_path = Path(config_path)
        if not config_path.exists():
            raise FileNotFoundError(
                f"Configuration file not found: {config_path}\n"
                f"Create config/config.json or specify path with --config."
            )

        config = load_json(config_path)
        Print("DEBUG", f"Loaded configuration v{config.get('version', 'unknown')}")
        return config

    def options(self, seed: int = 0, max_vertices: Optional[int] = None, n: Optional[int] = None,
                instances: Sequence[str] = ()) -> SuiteOptions:
        return SuiteOptions(self.config, seed, max_vertices, n, tuple(instances), self.threads)

    # ------------------------------------------------------------------ graphs

    def validate_graph(self, path: Path) -> Dict[str, Any]:
        """Every violated invariant of a graph document; an empty list when valid."""
        raw, direction, out_labels, in_labels, trivial = raw_from_json(load_json(path))
        try:
            G = validate(raw, direction, out_labels, in_labels, trivial)
        except GraphValidationError as e:
            return {"valid": False, "violations": [{"code": c, "message": m} for c, m in e.violations]}
        return {"valid": True, "shape": shape_label(G), "violations": []}

    def canonical_graph(self, path: Path) -> Dict[str, Any]:
        G = graph_from_json(load_json(path))
        cf = canonical_form(G)
        return {"shape": shape_label(G), "code": repr(cf.code), "graph": graph_to_json(cf.graph)}

    def contract_graph(self, path: Path, source: str, target: str) -> Dict[str, Any]:
        """
        Contract the thick edge source -> target.

        Raises:
            GraphError: not-a-thick-edge
        """
        G = graph_from_json(load_json(path))
        eps = thick_edge_by_ends(G, source, target)
        admissible = is_admissible(G, eps)
        H = contract_thick_edge(G, eps)
        return {"admissible": admissible, "shape": shape_label(H), "graph": graph_to_json(H)}

    # ------------------------------------------------------------------- trees

    def enumerate_trees(self, path: Path, mode: str = "both") -> Dict[str, Any]:
        """T_G (binary), T^_G (general) or both, in canonical order."""
        G = graph_from_json(load_json(path))
        payload: Dict[str, Any] = {"shape": shape_label(G), "counts": {}}
        if mode in ("binary", "both"):
            T = sort_trees(enumerate_T(G)) if G.size >= 2 else []
            payload["T"] = [t.to_json() for t in T]
            payload["counts"]["T"] = len(T)
        if mode in ("general", "both"):
            T_hat = sort_trees(enumerate_That(G)) if G.size >= 2 else []
            payload["T_hat"] = [t.to_json() for t in T_hat]
            payload["counts"]["T_hat"] = len(T_hat)
        return payload

    def partner(self, path: Path) -> Report:
        G = graph_from_json(load_json(path))
        return Report("trees partner", partner_check(G), {"shape": shape_label(G)})

    # ---------------------------------------------------------------- properad

    def instance(self, kind: str, seed: int = 0, parameters: Optional[Dict[str, Any]] = None) -> BuiltInstance:
        return build_instance(InstanceSpec(kind, dict(parameters or {}), seed), self.config)

    def _strict_source(self, path: Optional[Path], kind: Optional[str], seed: int) -> Properad:
        if path is not None:
            return table_properad(load_json(path), Path(path).stem)
        source = self.instance(kind or "table-properad", seed).source
        if not isinstance(source, Properad):
            raise DomainError("not-strict", f"Instance '{kind}' is an sh-properad; use 'properad check-sh'")
        return source

    def check_assoc(self, path: Optional[Path] = None, kind: Optional[str] = None, seed: int = 0) -> Report:
        """Associativity, derivation and unit laws of a strict properad."""
        P = self._strict_source(path, kind, seed)
        limit = int(self.config.get("verification", {}).get("max_decorations_per_graph", 48))
        rng = self.options(seed).rng()
        records = check_associativity(P, limit, rng) + check_derivation(P, limit, rng) + check_unit(P)
        return Report("properad check-assoc", records, {"properad": P.name, "seed": seed})

    def check_sh(self, kind: str = "transferred-sh", seed: int = 0, max_vertices: Optional[int] = None) -> Report:
        built = self.instance(kind, seed)
        source = built.source
        if isinstance(source, Properad):
            bound = max_vertices or int(self.config.get("verification", {}).get("sh_family_bound", 5))
            source = strict_as_sh(source, bound)
        options = self.options(seed, max_vertices)
        records = check_sh(source, options.bound("max_vertices_sh", 4), options.limit, options.rng())
        return Report("properad check-sh", records, {"instance": kind, "seed": seed})

    # ---------------------------------------------------------------- transfer

    def _transfer_bound(self, built: BuiltInstance, max_vertices: Optional[int]) -> int:
        key = "max_vertices_strict" if built.strict else "max_vertices_sh"
        return self.options(max_vertices=max_vertices).bound(key, 4)

    def _transfer_instance(self, kind: str, seed: int, context: Optional[Path]) -> BuiltInstance:
        """A context file when given, otherwise a freshly built instance of `kind`."""
        if context is not None:
            return load_context(context, self.config)
        return self.instance(kind, seed)

    def transfer_run(self, kind: str, seed: int = 0, max_vertices: Optional[int] = None,
                     output: Optional[Path] = None, context: Optional[Path] = None) -> Dict[str, Any]:
        """The transferred family on every graph up to the bound, nonzero values only."""
        built = self._transfer_instance(kind, seed, context)
        bound = self._transfer_bound(built, max_vertices)
        arities = built.context.source.check_arities
        result = transferred_coderivation(built.context, bound, arities)
        options = self.options(seed, max_vertices)
        Print("STARTING", f"Transferring {built.context.name or built.spec.kind} up to {bound} vertices")
        rows = result.table(graphs_up_to(bound, arities), options.limit, options.rng())
        Print("COMPLETED", f"{len(rows)} nonzero entries")
        payload = {"instance": built.spec.to_json(), "bound": bound, "family": rows}
        if output is not None:
            _write_json(output, payload)
        return payload

    def transfer_verify(self, kind: str, seed: int = 0, max_vertices: Optional[int] = None,
                        what: str = "all", context: Optional[Path] = None) -> Report:
        """
        Verify one transfer.

        `what` picks the identity: codifferential, morphism, lemma3, eq1 or
        merkulov. "all" runs the codifferential and morphism checks together.
        """
        built = self._transfer_instance(kind, seed, context)
        options = self.options(seed, max_vertices)
        parameters = {"instance": built.spec.kind, "seed": seed, "what": what}
        if context is not None:
            parameters["context"] = str(context)
        if what == "merkulov":
            top = max_vertices or int(options.verification("merkulov_max_n", 5))
            parameters["n"] = top
            return Report("transfer verify", line_checks(built.context, top, options), parameters)
        bound = self._transfer_bound(built, max_vertices)
        parameters["bound"] = bound
        arities = built.context.source.check_arities
        if what in ("lemma3", "eq1"):
            check = check_lemma3 if what == "lemma3" else check_eq1
            graphs = graphs_up_to(bound, arities, min_vertices=2)
            records = check(built.context, graphs, seeds=int(options.verification("seeds", 10)))
            return Report("transfer verify", records, parameters)
        result = transferred_coderivation(built.context, bound, arities)
        graphs = graphs_up_to(bound, arities)
        records = []
        if what in ("all", "codifferential"):
            records += check_codifferential(result, graphs, options.limit, options.rng())
        if what in ("all", "morphism"):
            records += check_morphism(result, graphs, options.limit, options.rng())
        return Report("transfer verify", records, parameters)

    # --------------------------------------------------------------- artifacts

    def build(self, spec: InstanceSpec, output: Optional[Path] = None) -> Dict[str, Any]:
        built = build_instance(spec, self.config)
        payload = built.to_json()
        if output is not None:
            _write_json(output, payload)
        return payload

    def catalog(self, max_vertices: int, m: int, n: int, output: Optional[Path] = None) -> Dict[str, Any]:
        guards = self.config.get("catalog", {})
        entries = dump_catalog(max_vertices, m, n, output,
                               max_multiplicity=int(guards.get("max_edge_multiplicity", 1)),
                               max_work=int(guards.get("max_work", 2_000_000)),
                               max_legs_per_side=int(guards.get("max_legs_per_side", 4)),
                               max_vertices_guard=int(guards.get("max_vertices", 5)))
        return {"m": m, "n": n, "max_vertices": max_vertices, "graphs": entries}

    def run_suite(self, name: str, seed: int = 0, max_vertices: Optional[int] = None, n: Optional[int] = None,
                  instances: Sequence[str] = ()) -> Report:
        return run_suite(name, self.options(seed, max_vertices, n, instances))


def _write_json(path: Path, payload: Dict[str, Any]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
    Print("SUCCESS", f"Wrote {path}")


def _parse_parameters(pairs: Sequence[str]) -> Dict[str, Any]:
    """key=value pairs; values are read as JSON when they parse, as strings otherwise."""
    out: Dict[str, Any] = {}
    for pair in pairs:
        if "=" not in pair:
            raise DomainError("spec-invalid", f"Expected key=value, got '{pair}'")
        key, value = pair.split("=", 1)
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _emit(payload: Any, fmt: str) -> None:
    if isinstance(payload, Report):
        print(json.dumps(payload.to_json(), indent=2) if fmt == "json" else payload.render_text())
    elif fmt == "json":
        print(json.dumps(payload, indent=2))
    else:
        for key, value in payload.items():
            print(f"{key}: {value if isinstance(value, (str, int, bool)) else json.dumps(value)}")


def main(argv: Optional[List[str]] = None):
    """Command-line entry point."""
    import argparse

    parser = argparse.ArgumentParser(
        description='properad-htt: exact verification of homotopy transfer for properads',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python properad_htt.py graphs validate graph.json
  python properad_htt.py trees enumerate --graph graph.json --mode binary --format json
  python properad_htt.py instance build endomorphism-dga --param dimension=4 --output ctx.json
  python properad_htt.py transfer run --context ctx.json --max-vertices 3 --out result.json
  python properad_htt.py catalog dump --max-vertices 3 --m 1 --n 1
  python properad_htt.py suite run --name merkulov --n 5
        """
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=0, help='Seed for every random choice (default: 0)')
    common.add_argument('--max-vertices', type=int, default=None, help='Graph-size bound (default: from config)')
    common.add_argument('--format', choices=['json', 'text'], default=None, help='Output format (default: from config)')
    common.add_argument('--config', type=Path, default=None, help='Path to config.json')

    groups = parser.add_subparsers(dest='group', required=True)

    graphs = groups.add_parser('graphs', parents=[common], help='Validate, canonicalize or contract a graph document')
    graphs.add_argument('action', choices=['validate', 'canon', 'contract'])
    graphs.add_argument('input', type=Path, help='Graph JSON file')
    graphs.add_argument('--source', default=None, help='Source vertex of the thick edge to contract')
    graphs.add_argument('--target', default=None, help='Target vertex of the thick edge to contract')

    trees = groups.add_parser('trees', parents=[common], help='Contraction trees of a graph')
    trees.add_argument('action', choices=['enumerate', 'partner'])
    trees.add_argument('input', type=Path, nargs='?', default=None, help='Graph JSON file')
    trees.add_argument('--graph', type=Path, default=None, help='Graph JSON file (instead of the positional input)')
    trees.add_argument('--mode', choices=['binary', 'general', 'both'], default='both',
                       help='binary: T_G, general: T^_G (default: both)')

    properad = groups.add_parser('properad', parents=[common], help='Check properad or sh-properad laws')
    properad.add_argument('action', choices=['check-assoc', 'check-sh'])
    properad.add_argument('--input', type=Path, default=None, help='Table properad JSON file')
    properad.add_argument('--instance', default=None, help='Instance kind to build instead of a file')

    transfer = groups.add_parser('transfer', parents=[common], help='Run or verify a transfer')
    transfer.add_argument('action', choices=['run', 'verify'])
    transfer.add_argument('--instance', default='endomorphism-dga', help='Instance kind (default: endomorphism-dga)')
    transfer.add_argument('--context', type=Path, default=None,
                          help='Context JSON (table context or instance build output) instead of --instance')
    transfer.add_argument('--output', '--out', dest='output', type=Path, default=None,
                          help='Write the transferred family here')
    transfer.add_argument('--what', choices=['all', 'codifferential', 'morphism', 'lemma3', 'eq1', 'merkulov'],
                          default='all', help='Identity to verify (default: codifferential and morphism)')

    instance = groups.add_parser('instance', parents=[common], help='Build an instance')
    instance.add_argument('action', choices=['build'])
    instance.add_argument('kind', nargs='?', default=None, help='Instance kind')
    instance.add_argument('--spec', type=Path, default=None, help='InstanceSpec JSON file')
    instance.add_argument('--param', action='append', default=[], help='Parameter override key=value')
    instance.add_argument('--output', type=Path, default=None, help='Write the instance here')

    catalog = groups.add_parser('catalog', parents=[common], help='Dump the graph catalog')
    catalog.add_argument('action', choices=['dump'])
    catalog.add_argument('--m', type=int, default=1, help='Output legs')
    catalog.add_argument('--n', type=int, default=1, help='Input legs')
    catalog.add_argument('--output', type=Path, default=None, help='Write the catalog here')

    suite = groups.add_parser('suite', parents=[common], help='Run a verification suite')
    suite.add_argument('action', choices=['run', 'list'])
    suite.add_argument('--name', default=None, help='Suite name')
    suite.add_argument('--n', type=int, default=None, help='Largest arity for the algebra oracle')
    suite.add_argument('--instance', action='append', default=[], help='Instance kind (repeatable)')
    suite.add_argument('--output', type=Path, default=None, help='Write the report here')

    args = parser.parse_args(argv)

    try:
        pipeline = VerificationPipeline(config_path=args.config)
        fmt = args.format or pipeline.config.get("reports", {}).get("format", "text")

        if args.group == 'graphs':
            if args.action == 'validate':
                payload = pipeline.validate_graph(args.input)
                _emit(payload, fmt)
                return 0 if payload["valid"] else 2
            if args.action == 'canon':
                _emit(pipeline.canonical_graph(args.input), fmt)
                return 0
            if not (args.source and args.target):
                parser.error("graphs contract needs --source and --target")
            _emit(pipeline.contract_graph(args.input, args.source, args.target), fmt)
            return 0

        if args.group == 'trees':
            graph_path = args.graph or args.input
            if graph_path is None:
                parser.error("trees needs a graph file (positional or --graph)")
            if args.action == 'enumerate':
                _emit(pipeline.enumerate_trees(graph_path, args.mode), fmt)
                return 0
            report = pipeline.partner(graph_path)

        elif args.group == 'properad':
            if args.action == 'check-assoc':
                report = pipeline.check_assoc(args.input, args.instance, args.seed)
            else:
                report = pipeline.check_sh(args.instance or 'transferred-sh', args.seed, args.max_vertices)

        elif args.group == 'transfer':
            if args.action == 'run':
                payload = pipeline.transfer_run(args.instance, args.seed, args.max_vertices, args.output,
                                               args.context)
                if args.output is None:
                    _emit(payload, fmt)
                return 0
            report = pipeline.transfer_verify(args.instance, args.seed, args.max_vertices, args.what,
                                                  args.context)

        elif args.group == 'instance':
            if args.spec is not None:
                spec = InstanceSpec.from_json(load_json(args.spec))
            elif args.kind:
                spec = InstanceSpec(args.kind, _parse_parameters(args.param), args.seed)
            else:
                parser.error("instance build needs a kind or --spec")
            payload = pipeline.build(spec, args.output)
            if args.output is None:
                _emit(payload, fmt)
            return 0

        elif args.group == 'catalog':
            max_vertices = args.max_vertices or 3
            payload = pipeline.catalog(max_vertices, args.m, args.n, args.output)
            if args.output is None:
                _emit(payload, fmt)
            return 0

        else:
            if args.action == 'list':
                for name in SUITE_REGISTRY:
                    print(name)
                return 0
            if not args.name:
                parser.error("suite run needs --name")
            report = pipeline.run_suite(args.name, args.seed, args.max_vertices, args.n, args.instance)
            if args.output is not None:
                report.write(args.output, fmt)

        _emit(report, fmt)
        return 0 if report.passed else 1

    except FileNotFoundError as e:
        Print("FAILURE", str(e))
        return 1
    except DomainError as e:
        Print("FAILURE", f"Invalid input: {e}")
        return 2
    except ValueError as e:
        Print("FAILURE", str(e))
        return 2
    except KeyboardInterrupt:
        Print("WARNING", "Interrupted by user")
        return 130
    except Exception as e:
        Print("FAILURE", f"Unexpected error: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    import sys
    sys.exit(main())
