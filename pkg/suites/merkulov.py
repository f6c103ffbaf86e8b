"""
merkulov: on dg algebras the graph engine restricted to line graphs must
reproduce the classical transferred A-infinity operations.
"""

from typing import List

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from algebra.bimodule import decoration_tuples
from algebra.exactlinalg import format_scalar
from algebra.merkulov import MerkulovOracle
from algebra.reports import CheckRecord, failed, passed
from algebra.transfer import TransferContext, TransferEngine
from combinatorics.graphcore import line_graph
from instances.base import BuiltInstance
from suites import register_suite
from suites.base import SuiteOptions, per_instance


def _format(vec) -> dict:
    return {x: format_scalar(c) for x, c in sorted(vec.items())}


def line_checks(ctx: TransferContext, top: int, options: SuiteOptions) -> List[CheckRecord]:
    """partial_G on line graphs of 2..top vertices against the recursion."""
    oracle = MerkulovOracle(ctx)
    engine = TransferEngine(ctx)
    records = []
    for n in range(2, top + 1):
        line = line_graph(n)
        identity = f"partial_G(line {n}) = m_{n}"
        failure = None
        count = 0
        for xs in decoration_tuples(ctx.target, line, options.limit, options.rng(n)):
            count += 1
            graph_value = engine.partial_G(line, xs)
            oracle_value = oracle.m(xs)
            if graph_value != oracle_value:
                failure = {"n": n, "decorations": list(xs), "graph_engine": _format(graph_value),
                           "oracle": _format(oracle_value)}
                break
        records.append(passed(f"line {n}", identity, f"{count} tuples") if failure is None
                       else failed(f"line {n}", identity, failure))
    return records


class MerkulovSuite:
    name = "merkulov"

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        top = options.n or int(options.verification("merkulov_max_n", 5))

        def check(built: BuiltInstance) -> List[CheckRecord]:
            return line_checks(built.context, top, options)

        return per_instance(options, self.name, ["endomorphism-dga", "table-properad"], check)


@register_suite("merkulov")
class MerkulovSuiteFactory:
    @staticmethod
    def create(config: dict) -> MerkulovSuite:
        return MerkulovSuite()
