"""
Verification Suite Registry

Factory pattern with decorator-based registration, one module per family of
suites. run_suite() times a suite and wraps its records into a Report.

Usage:
    # In a suite module:
    @register_suite("lemma21")
    class PartnerSuiteFactory:
        @staticmethod
        def create(config: dict) -> Suite:
            return PartnerSuite()

    # To run one:
    report = run_suite("lemma21", SuiteOptions(config=config))
"""

import time
from typing import Callable, Dict

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import CPU_and_Mem_usage, Print, import_plugins
from algebra.reports import Report
from .base import Suite, SuiteOptions

# Global registry of suite factories
SUITE_REGISTRY: Dict[str, Callable[[dict], Suite]] = {}


def register_suite(name: str):
    """
    Decorator to register suite factories.

    Args:
        name: Suite name as given to `suite run --name`

    Returns:
        Decorator function that registers the factory class
    """
    def decorator(factory_class):
        SUITE_REGISTRY[name] = factory_class.create
        return factory_class
    return decorator


def get_suite(name: str, config: dict) -> Suite:
    """
    Get a suite instance by name.

    Raises:
        ValueError: If the suite is not registered
    """
    if name not in SUITE_REGISTRY:
        available = ', '.join(SUITE_REGISTRY) if SUITE_REGISTRY else 'none'
        raise ValueError(
            f"Unknown suite: '{name}'. "
            f"Available suites: {available}"
        )
    return SUITE_REGISTRY[name](config)


def run_suite(name: str, options: SuiteOptions) -> Report:
    """Run one suite and assemble its report."""
    suite = get_suite(name, options.config)
    Print("STARTING", f"Suite {name} (seed {options.seed}, {options.threads} thread(s))")
    start = time.time()
    records = suite.run(options)
    report = Report(name, records, {"seed": options.seed}, time.time() - start)
    if options.max_vertices is not None:
        report.parameters["max_vertices"] = options.max_vertices
    if options.n is not None:
        report.parameters["n"] = options.n
    if options.instances:
        report.parameters["instances"] = list(options.instances)
    totals = report.totals()
    status = "SUCCESS" if report.passed else "FAILURE"
    Print(status, f"Suite {name}: {totals['passed']}/{totals['checks']} checks passed in {report.wall_time:.2f}s")
    Print("INFO", CPU_and_Mem_usage())
    return report


# Auto-import suites to trigger registration, in report order
import_plugins(__name__, ["graph_laws", "tree_laws", "lemmas", "coalgebra", "transfer_suites", "merkulov"])
