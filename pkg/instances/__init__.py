"""
Instance Builder Registry

Factory pattern with decorator-based registration. Each module in this
package builds one kind of source structure together with its retract data.

Usage:
    # In a builder module:
    @register_instance("endomorphism-dga")
    class EndomorphismInstanceFactory:
        @staticmethod
        def create(config: dict) -> InstanceBuilder:
            return EndomorphismInstanceBuilder(config)

    # To build an instance:
    built = build_instance(InstanceSpec("endomorphism-dga", seed=0), config)
"""

from typing import Callable, Dict, Optional

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import import_plugins
from .base import BuiltInstance, InstanceBuilder, InstanceSpec

# Global registry of instance builder factories
INSTANCE_REGISTRY: Dict[str, Callable[[dict], InstanceBuilder]] = {}


def register_instance(name: str):
    """
    Decorator to register instance builder factories.

    Args:
        name: Instance kind, as used in InstanceSpec.kind and on the CLI

    Returns:
        Decorator function that registers the factory class
    """
    def decorator(factory_class):
        INSTANCE_REGISTRY[name] = factory_class.create
        return factory_class
    return decorator


def get_instance_builder(name: str, config: dict) -> InstanceBuilder:
    """
    Get an instance builder by kind.

    Args:
        name: Instance kind (must be registered)
        config: The full configuration dictionary

    Raises:
        ValueError: If the kind is not registered
    """
    if name not in INSTANCE_REGISTRY:
        available = ', '.join(sorted(INSTANCE_REGISTRY)) if INSTANCE_REGISTRY else 'none'
        raise ValueError(
            f"Unknown instance kind: '{name}'. "
            f"Available kinds: {available}"
        )
    return INSTANCE_REGISTRY[name](config)


def build_instance(spec: InstanceSpec, config: Optional[dict] = None) -> BuiltInstance:
    """Build a spec with the registered builder for its kind."""
    return get_instance_builder(spec.kind, config or {}).build(spec)


# Auto-import builders to trigger registration
import_plugins(__name__, ["endomorphism", "table", "commutative", "free", "transferred"])
