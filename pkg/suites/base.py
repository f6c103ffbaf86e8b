"""
Verification Suite Protocol

Defines the interface every suite implements, the options they read, and
the ordered parallel map they use to spread checks over graph shapes.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Protocol, Sequence, TypeVar

import numpy as np

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import Print
from algebra.bimodule import Arity, parse_arity
from algebra.reports import CheckRecord
from instances import build_instance
from instances.base import BuiltInstance, InstanceSpec

T = TypeVar("T")


@dataclass
class SuiteOptions:
    """
    Everything a suite may read.

    Attributes:
        config: The full configuration dictionary
        seed: Base seed for numpy.random.default_rng
        max_vertices: Overrides the configured graph-size bound
        n: Largest operation arity for the algebra oracle
        instances: Instance kinds to run on (empty: the suite's defaults)
        threads: Worker threads for map_checks
    """

    config: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    max_vertices: Optional[int] = None
    n: Optional[int] = None
    instances: Sequence[str] = ()
    threads: int = 1

    def verification(self, key: str, default: Any = None) -> Any:
        return self.config.get("verification", {}).get(key, default)

    def bound(self, key: str, default: int) -> int:
        """A vertex bound: the CLI override when given, the configured value otherwise."""
        if self.max_vertices is not None:
            return self.max_vertices
        return int(self.verification(key, default))

    @property
    def arities(self) -> List[Arity]:
        return [parse_arity(a) for a in self.verification("arities", [[1, 1], [2, 1], [1, 2]])]

    @property
    def limit(self) -> int:
        return int(self.verification("max_decorations_per_graph", 48))

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)

    def kinds(self, suite: str, defaults: Sequence[str]) -> List[str]:
        """Instance kinds for a suite: CLI choice, then config, then the suite's defaults."""
        if self.instances:
            return list(self.instances)
        return list(self.config.get("suites", {}).get(suite, defaults))

    def build(self, kind: str, **parameters) -> BuiltInstance:
        return build_instance(InstanceSpec(kind, parameters, self.seed), self.config)


class Suite(Protocol):
    """
    Protocol for verification suites.

    A suite turns options into check records. It never raises on a
    mathematical failure; failing identities become records with witnesses.
    """

    name: str

    def run(self, options: SuiteOptions) -> List[CheckRecord]:
        """
        Execute every check of the suite.

        Args:
            options: Seeds, bounds, instances and thread budget

        Returns:
            Records in a deterministic order
        """
        ...


def map_checks(fn: Callable[[T], List[CheckRecord]], items: Iterable[T], threads: int = 1) -> List[CheckRecord]:
    """
    Apply fn to every item and concatenate the records in item order.

    With more than one thread the items run on a ThreadPoolExecutor; the
    ordered map keeps the report independent of scheduling.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        results = [fn(item) for item in items]
    else:
        Print("DEBUG", f"Checking {len(items)} shapes on {threads} threads")
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(fn, items))
    return [r for batch in results for r in batch]


def tagged(prefix: str, records: Iterable[CheckRecord]) -> List[CheckRecord]:
    """Records with the instance name put in front of the shape."""
    return [CheckRecord(f"{prefix}: {r.shape}", r.identity, r.passed, r.witness, r.detail) for r in records]


def per_instance(options: SuiteOptions, suite: str, defaults: Sequence[str],
                 check: Callable[[BuiltInstance], List[CheckRecord]]) -> List[CheckRecord]:
    """Build every instance kind the suite runs on and tag the records of `check` with it."""
    records: List[CheckRecord] = []
    for kind in options.kinds(suite, defaults):
        built = options.build(kind)
        Print("PROGRESS", f"{suite}: instance {built.context.name or kind}")
        records.extend(tagged(kind, check(built)))
    return records
