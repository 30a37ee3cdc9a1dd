"""Exception types shared across the toolkit.

Every error carries structured data and can render itself as a JSON-able
payload, so the CLI and the HTTP service report identical diagnostics.
"""

from __future__ import annotations

from typing import Any


class WhyplanError(Exception):
    """Base class for all toolkit errors."""

    def payload(self) -> dict[str, Any]:
        data = {"error": type(self).__name__, "message": str(self)}
        data.update(self.details())
        return data

    def details(self) -> dict[str, Any]:
        return {}


class PddlSyntaxError(WhyplanError):
    """Malformed input text; points at the offending token."""

    def __init__(self, line: int, column: int, expected: str, got: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        self.got = got
        where = f"line {line}, column {column}"
        msg = f"{where}: expected {expected}"
        if got:
            msg += f", got {got!r}"
        super().__init__(msg)

    def details(self) -> dict[str, Any]:
        return {
            "line": self.line,
            "column": self.column,
            "expected": self.expected,
            "got": self.got,
        }


class UnsupportedFeature(WhyplanError):
    """Input uses a construct outside the supported classical subset."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unsupported feature: {name}")

    def details(self) -> dict[str, Any]:
        return {"feature": self.name}


class UnknownType(WhyplanError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown type: {name}")

    def details(self) -> dict[str, Any]:
        return {"type": self.name}


class UnknownPredicate(WhyplanError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown predicate: {name}")

    def details(self) -> dict[str, Any]:
        return {"predicate": self.name}


class UnknownObject(WhyplanError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown object: {name}")

    def details(self) -> dict[str, Any]:
        return {"object": self.name}


class TypeMismatch(WhyplanError):
    def __init__(self, literal: str, expected: str):
        self.literal = literal
        self.expected = expected
        super().__init__(f"ill-typed literal {literal}: expected {expected}")

    def details(self) -> dict[str, Any]:
        return {"literal": self.literal, "expected": self.expected}


class DomainMismatch(WhyplanError):
    def __init__(self, expected: str, got: str):
        self.expected = expected
        self.got = got
        super().__init__(f"problem is for domain {got!r}, not {expected!r}")


class GroundingLimitExceeded(WhyplanError):
    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"grounding would create {count} instantiations (cap {limit})")

    def details(self) -> dict[str, Any]:
        return {"count": self.count, "limit": self.limit}


class NotApplicable(WhyplanError):
    """An action's precondition does not hold; lists the offending literals."""

    def __init__(self, missing_pos, violated_neg, step: int | None = None):
        self.missing_pos = tuple(missing_pos)
        self.violated_neg = tuple(violated_neg)
        self.step = step
        parts = []
        if self.missing_pos:
            parts.append("missing " + " ".join(str(a) for a in self.missing_pos))
        if self.violated_neg:
            parts.append("violated " + " ".join(f"(not {a})" for a in self.violated_neg))
        at = f" at step {step}" if step is not None else ""
        super().__init__(f"action not applicable{at}: " + "; ".join(parts))

    def details(self) -> dict[str, Any]:
        return {
            "missing": [str(a) for a in self.missing_pos],
            "violated": [str(a) for a in self.violated_neg],
            "step": self.step,
        }


class InvalidPlan(WhyplanError):
    def __init__(self, reason: str = "plan failed validation"):
        super().__init__(reason)


class StepOutOfRange(WhyplanError):
    def __init__(self, step: int, length: int):
        self.step = step
        self.length = length
        super().__init__(f"step {step} out of range for plan of length {length}")


class UnknownAction(WhyplanError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown ground action: {name}")

    def details(self) -> dict[str, Any]:
        return {"action": self.name}


class PrefixInvalid(WhyplanError):
    def __init__(self, reason: str):
        super().__init__(f"plan prefix not executable: {reason}")


class StaleUpdate(WhyplanError):
    def __init__(self, seq: int, last_seq: int):
        self.seq = seq
        self.last_seq = last_seq
        super().__init__(f"update seq {seq} is not greater than last seen {last_seq}")

    def details(self) -> dict[str, Any]:
        return {"seq": self.seq, "last_seq": self.last_seq}


class RevalidationFailed(WhyplanError):
    """The observed change actually breaks the remaining plan (replan needed)."""

    def __init__(self, report):
        self.report = report
        super().__init__("remaining plan is no longer executable under the observed state")

    def details(self) -> dict[str, Any]:
        return {"revalidation": self.report.to_json()}


class UnknownSession(WhyplanError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session: {session_id}")
