"""Exception types shared across the engine.

Every layer raises a subclass of EthosChatError so callers (CLI, HTTP API)
can map failures to a small, stable set of error codes.
"""

from __future__ import annotations


class EthosChatError(Exception):
    """Base class for all errors raised by this package."""


# --- logic / parsing ---------------------------------------------------------


class ProgramSyntaxError(EthosChatError):
    """Malformed program text. Carries the 1-based source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnsafeRuleError(EthosChatError):
    """A rule uses a variable in its head or a naf-literal that is not bound
    by any positive body literal."""

    def __init__(self, rule_text: str, variable: str):
        super().__init__(f"unsafe rule (variable {variable} unbound): {rule_text}")
        self.rule_text = rule_text
        self.variable = variable


class ArityClashError(EthosChatError):
    """The same predicate or function symbol is used with two arities."""

    def __init__(self, name: str, seen: int, expected: int, rule_text: str):
        super().__init__(
            f"arity clash for '{name}': {seen} vs {expected} in: {rule_text}"
        )
        self.name = name
        self.seen = seen
        self.expected = expected
        self.rule_text = rule_text


# --- solver ------------------------------------------------------------------


class GroundExplosionError(EthosChatError):
    """Grounding would exceed the configured instance cap."""

    def __init__(self, estimate: int, cap: int):
        super().__init__(f"grounding would produce ~{estimate} rules (cap {cap})")
        self.estimate = estimate
        self.cap = cap


class InconsistentProgramError(EthosChatError):
    """The program has no answer set, so entailment is undefined."""


class NoDerivationError(EthosChatError):
    """Asked to explain an atom that is not in the given answer set."""


# --- learner -----------------------------------------------------------------


class DuplicateWindowError(EthosChatError):
    """A training window id was seen before."""

    def __init__(self, window_id: str):
        super().__init__(f"window id already processed: {window_id}")
        self.window_id = window_id


class QuarantineError(EthosChatError):
    """The window's labels cannot be reconciled with the accumulated evidence
    inside the mode language; the window is rejected and nothing is revised."""

    def __init__(self, window_id: str, reason: str):
        super().__init__(f"window {window_id} quarantined: {reason}")
        self.window_id = window_id
        self.reason = reason


# --- store -------------------------------------------------------------------


class StorageIOError(EthosChatError):
    """Underlying file could not be read or written."""


class DuplicateRecordError(EthosChatError):
    """Append rejected because the payload's identity was stored before."""


class CorruptJournalError(EthosChatError):
    """Journal replay hit a record that cannot be decoded."""

    def __init__(self, sequence: int, detail: str):
        super().__init__(f"journal corrupt at record {sequence}: {detail}")
        self.sequence = sequence
        self.detail = detail


# --- dialogue engine ---------------------------------------------------------


class MalformedTurnError(EthosChatError):
    """Scenario fields missing, ill-typed, or outside the known vocabulary."""


class StaleHandleError(EthosChatError):
    """A response handle was reused across scenarios."""

    def __init__(self, handle: str):
        super().__init__(f"response handle already used: {handle}")
        self.handle = handle
