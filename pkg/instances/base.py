"""
Instance Builder Protocol

Defines what every instance kind provides: a deterministic construction of
a source (sh-)properad together with validated retract data onto a target
bimodule.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Protocol, Union

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import DomainError
from algebra.bimodule import bimodule_to_json
from algebra.exactlinalg import map_to_json
from algebra.properad import Properad, ShProperad
from algebra.transfer import TransferContext


class InstanceError(DomainError):
    """An instance spec with missing or out-of-range parameters."""


@dataclass(frozen=True)
class InstanceSpec:
    """
    What to build.

    Attributes:
        kind: Registered builder name (e.g. 'endomorphism-dga')
        parameters: Kind-specific parameters, merged over config defaults
        seed: Seed for numpy.random.default_rng
    """

    kind: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def get(self, key: str, default: Any = None) -> Any:
        return self.parameters.get(key, default)

    def to_json(self) -> Dict[str, Any]:
        return {"kind": self.kind, "seed": self.seed, "parameters": dict(self.parameters)}

    @staticmethod
    def from_json(data: Dict[str, Any]) -> "InstanceSpec":
        if "kind" not in data:
            raise InstanceError("spec-invalid", "Instance spec needs a 'kind'")
        return InstanceSpec(str(data["kind"]), dict(data.get("parameters", {})), int(data.get("seed", 0)))


@dataclass
class BuiltInstance:
    """
    A source structure with validated retract data.

    Attributes:
        spec: The spec it was built from
        source: Strict Properad or ShProperad
        context: Retract data onto the target bimodule
        notes: Extra facts for reports (dimensions, side conditions)
    """

    spec: InstanceSpec
    source: Union[Properad, ShProperad]
    context: TransferContext
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def strict(self) -> bool:
        return isinstance(self.source, Properad)

    def to_json(self) -> Dict[str, Any]:
        ctx = self.context
        return {
            "spec": self.spec.to_json(),
            "source": {"name": getattr(self.source, "name", ""), "strict": self.strict,
                       "bimodule": bimodule_to_json(ctx.source_bimodule)},
            "target": bimodule_to_json(ctx.target),
            "f": {f"{m},{n}": map_to_json(phi) for (m, n), phi in sorted(ctx.f.items())},
            "g": {f"{m},{n}": map_to_json(phi) for (m, n), phi in sorted(ctx.g.items())},
            "h": {f"{m},{n}": map_to_json(phi) for (m, n), phi in sorted(ctx.h.items())},
            "notes": self.notes,
        }


class InstanceBuilder(Protocol):
    """
    Protocol for instance builders.

    Builders are pure: the same spec (kind, parameters, seed) must produce
    the same instance, byte for byte once serialized.
    """

    def build(self, spec: InstanceSpec) -> BuiltInstance:
        """
        Construct the instance.

        Args:
            spec: Kind, parameters and seed

        Returns:
            BuiltInstance with a validated TransferContext

        Raises:
            InstanceError: If parameters are missing or out of range
        """
        ...


def resolve_parameters(config: dict, spec: InstanceSpec) -> Dict[str, Any]:
    """Config defaults for the spec's kind, overridden by the spec's own parameters."""
    merged = dict(config.get("instances", {}).get(spec.kind, {}))
    merged.update(spec.parameters)
    return merged


def require_int(params: Dict[str, Any], key: str, low: int, high: int) -> int:
    """
    Read an integer parameter inside [low, high].

    Raises:
        InstanceError: spec-invalid
    """
    if key not in params:
        raise InstanceError("spec-invalid", f"Missing parameter '{key}'")
    value = params[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError("spec-invalid", f"Parameter '{key}' must be an integer, got {value!r}")
    if not low <= value <= high:
        raise InstanceError("spec-invalid", f"Parameter '{key}' = {value} is outside [{low}, {high}]")
    return value
