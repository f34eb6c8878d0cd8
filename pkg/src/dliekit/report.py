"""Result records shared by the check operations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Verdict:
    """A boolean outcome with an optional counterexample."""

    ok: bool
    witness: Any = None

    def __bool__(self):
        return self.ok


@dataclass
class Check:
    name: str
    status: str  # "pass", "fail" or "n/a"
    witness: Any = None
    count: int = 0


@dataclass
class Report:
    """Outcome of a check suite: one entry per named property."""

    title: str
    seed: int | None = None
    checks: list[Check] = field(default_factory=list)

    def record(self, name: str, ok: bool, witness: Any = None, count: int = 0) -> bool:
        self.checks.append(Check(name, "pass" if ok else "fail", None if ok else witness, count))
        return ok

    def skip(self, name: str, reason: str = "not applicable"):
        self.checks.append(Check(name, "n/a", reason))

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def __bool__(self):
        return self.passed

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == "fail"]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "seed": self.seed,
            "status": "pass" if self.passed else "fail",
            "checks": [
                {"name": c.name, "status": c.status, "count": c.count, "witness": stringify(c.witness)}
                for c in self.checks
            ],
        }


def stringify(obj: Any) -> Any:
    """Render witnesses (polys, matrices, tuples) as JSON-friendly values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, dict):
        return {str(k): stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [stringify(v) for v in obj]
    return str(obj)
