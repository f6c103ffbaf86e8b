"""
Check records and suite reports.

Every verification produces CheckRecords; a Report collects them in the
order the checks were issued, so two runs with the same seed render to the
same text apart from the timing line.
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional


@dataclass(frozen=True)
class CheckRecord:
    """
    Outcome of one identity on one graph shape.

    Attributes:
        shape: Graph shape key (see graphcore.shape_label)
        identity: The identity checked, as a formula string
        passed: Whether it held exactly
        witness: Re-loadable input that breaks the identity, or None
        detail: Free-form note (counts, values)
    """

    shape: str
    identity: str
    passed: bool
    witness: Optional[Dict[str, Any]] = None
    detail: str = ""


def passed(shape: str, identity: str, detail: str = "") -> CheckRecord:
    return CheckRecord(shape, identity, True, None, detail)


def failed(shape: str, identity: str, witness: Optional[Dict[str, Any]], detail: str = "") -> CheckRecord:
    return CheckRecord(shape, identity, False, witness, detail)


@dataclass
class Report:
    suite: str
    records: List[CheckRecord] = field(default_factory=list)
    parameters: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def totals(self) -> Dict[str, int]:
        n_failed = len(self.failures)
        return {"checks": len(self.records), "passed": len(self.records) - n_failed, "failed": n_failed}

    def to_json(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "parameters": self.parameters,
            "totals": self.totals(),
            "passed": self.passed,
            "wall_time": round(self.wall_time, 3),
            "records": [asdict(r) for r in self.records],
        }

    def render_text(self, show_passing: bool = False) -> str:
        totals = self.totals()
        lines = [f"suite {self.suite}: {totals['passed']}/{totals['checks']} checks passed "
                 f"({'PASS' if self.passed else 'FAIL'})"]
        for key, value in self.parameters.items():
            lines.append(f"  {key} = {value}")
        for r in self.records:
            if r.passed and not show_passing:
                continue
            mark = "ok  " if r.passed else "FAIL"
            line = f"  {mark} [{r.shape}] {r.identity}"
            if r.detail:
                line += f"  -- {r.detail}"
            lines.append(line)
            if r.witness is not None:
                lines.append(f"       witness: {json.dumps(r.witness, sort_keys=True)}")
        lines.append(f"  wall time {self.wall_time:.2f}s")
        return "\n".join(lines)

    def write(self, path: Path, fmt: str = "json") -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            if fmt == "json":
                json.dump(self.to_json(), f, indent=2, sort_keys=False)
            else:
                f.write(self.render_text(show_passing=True) + "\n")
        return path
