from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


PASS, FAIL, EXHAUSTED = "pass", "fail", "exhausted"


@dataclass
class Report:
    """Outcome of a suite or a bounded verification.

    ``bounds`` always names the budget a verdict holds for; a pass is never
    more than "certified within these bounds"."""

    name: str
    verdict: str
    bounds: dict = field(default_factory=dict)
    witness: Any = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        out = {"name": self.name, "verdict": self.verdict, "bounds": self.bounds, "witness": self.witness}
        out.update(self.details)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


class ExtractionError(Exception):
    """An extraction or certification step failed; ``report`` has the witness."""

    def __init__(self, message: str, report: Report):
        super().__init__(message)
        self.report = report
