"""Structured explanation answers shared by the CLI, service and monitor."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class ExplanationReport:
    """One answer: machine-checkable evidence plus a rendered text form."""

    question: str
    text: str
    evidence: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"question": self.question, "text": self.text, "evidence": self.evidence}
