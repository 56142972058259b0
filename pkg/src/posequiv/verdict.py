"""Three-valued finite-horizon verdicts and the default bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

HORIZON = 500
BOUND = 100
STAGE_BUDGET = 1000
QUIET = 50

HOLDS = "holds"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Holds / Violated carry a replayable witness; Inconclusive a reason."""

    status: str
    witness: dict[str, Any] = field(default_factory=dict)
    reason: str = ""

    @classmethod
    def holds(cls, **witness) -> "Verdict":
        return cls(HOLDS, witness)

    @classmethod
    def violated(cls, **witness) -> "Verdict":
        return cls(VIOLATED, witness)

    @classmethod
    def inconclusive(cls, reason: str, **witness) -> "Verdict":
        return cls(INCONCLUSIVE, witness, reason)

    @property
    def is_holds(self) -> bool:
        return self.status == HOLDS

    @property
    def is_violated(self) -> bool:
        return self.status == VIOLATED

    @property
    def is_inconclusive(self) -> bool:
        return self.status == INCONCLUSIVE

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"status": self.status}
        if self.witness:
            out["witness"] = _jsonable(self.witness)
        if self.reason:
            out["reason"] = self.reason
        return out


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (frozenset, set)):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Verdict):
        return value.to_dict()
    return value


def combine(verdicts) -> Verdict:
    """Conjunction: any Violated wins, then any Inconclusive, else Holds."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.is_violated:
            return v
    for v in verdicts:
        if v.is_inconclusive:
            return v
    return Verdict.holds(count=len(verdicts))
