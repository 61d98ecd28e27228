"""Durable, versioned persistence for everything the engine learns.

The store is an append-only journal: one JSON object per line, in the exact
layout

    {"sequence":N,"kind":"window","timestamp":"<RFC3339>","schema_version":1,"payload":{...}}

Record kinds are `window`, `hypothesis-snapshot`, `background`, and `modes`.
Replaying the journal from the top reconstructs the full in-memory state, so
any prefix of records is a valid store (crash at a record boundary loses at
most the unwritten suffix). A line that does not decode marks the journal
corrupt from that sequence number on.

Appends are flushed and fsynced before returning. The journal expects one
writer; readers only ever observe fully written lines.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .errors import CorruptJournalError, DuplicateRecordError, StorageIOError
from .learner import ExampleWindow, Hypothesis
from .modes import ModeDeclaration, parse_mode_text
from .parser import parse_program
from .logic import Program

SCHEMA_VERSION = 1
JOURNAL_NAME = "journal.jsonl"

KINDS = ("window", "hypothesis-snapshot", "background", "modes")


@dataclass(frozen=True)
class StoreRecord:
    sequence: int
    kind: str
    timestamp: str
    payload: dict

    def to_line(self) -> str:
        # Field order is part of the on-disk contract.
        return json.dumps(
            {
                "sequence": self.sequence,
                "kind": self.kind,
                "timestamp": self.timestamp,
                "schema_version": SCHEMA_VERSION,
                "payload": self.payload,
            },
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class StoreState:
    """Everything reconstructed from a journal replay."""

    background: Program
    modes: tuple[ModeDeclaration, ...]
    background_text: str
    modes_text: str
    windows: tuple[ExampleWindow, ...]
    hypothesis: Hypothesis
    hypothesis_version: int  # number of snapshots replayed

    def fingerprint(self) -> str:
        """Content hash of the replayed state, for replay-equivalence checks."""
        blob = json.dumps(
            {
                "background": self.background_text,
                "modes": self.modes_text,
                "windows": [w.to_payload() for w in self.windows],
                "hypothesis": self.hypothesis.to_payload(),
                "version": self.hypothesis_version,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class JournalStore:
    """File-backed default store. The same surface could sit on a remote
    document database; nothing above this layer would notice."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.path = self.directory / JOURNAL_NAME
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as err:
            raise StorageIOError(f"cannot create store at {self.directory}: {err}")
        self._records: list[StoreRecord] = []
        self._window_ids: set[str] = set()
        self._snapshot_count = 0
        if self.path.exists():
            self._replay()

    # -- reading ---------------------------------------------------------------

    def _replay(self) -> None:
        try:
            raw = self.path.read_text("utf-8")
        except OSError as err:
            raise StorageIOError(f"cannot read {self.path}: {err}")
        for i, line in enumerate(raw.splitlines()):
            expected = i + 1
            if not line.strip():
                raise CorruptJournalError(expected, "blank line inside journal")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise CorruptJournalError(expected, f"undecodable record: {err}")
            if obj.get("schema_version") != SCHEMA_VERSION:
                raise CorruptJournalError(
                    expected, f"unsupported schema_version {obj.get('schema_version')}"
                )
            if obj.get("sequence") != expected:
                raise CorruptJournalError(
                    expected, f"sequence {obj.get('sequence')} out of order"
                )
            if obj.get("kind") not in KINDS:
                raise CorruptJournalError(expected, f"unknown kind {obj.get('kind')}")
            record = StoreRecord(expected, obj["kind"], obj["timestamp"], obj["payload"])
            self._ingest(record)

    def _ingest(self, record: StoreRecord) -> None:
        if record.kind == "window":
            window_id = record.payload.get("id")
            if window_id in self._window_ids:
                raise CorruptJournalError(
                    record.sequence, f"duplicate window id {window_id}"
                )
            self._window_ids.add(window_id)
        elif record.kind == "hypothesis-snapshot":
            self._snapshot_count += 1
        self._records.append(record)

    # -- writing ---------------------------------------------------------------

    def _append(self, kind: str, payload: dict) -> int:
        record = StoreRecord(len(self._records) + 1, kind, _now(), payload)
        line = record.to_line() + "\n"
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as err:
            raise StorageIOError(f"append to {self.path} failed: {err}")
        self._ingest(record)
        return record.sequence

    def append_window(self, window: ExampleWindow) -> int:
        if window.id in self._window_ids:
            raise DuplicateRecordError(f"window id already stored: {window.id}")
        return self._append("window", window.to_payload())

    def snapshot_hypothesis(self, hypothesis: Hypothesis) -> int:
        payload = hypothesis.to_payload()
        payload["version"] = self._snapshot_count + 1
        return self._append("hypothesis-snapshot", payload)

    def set_background(self, text: str) -> int:
        parse_program(text)  # validate before persisting
        return self._append("background", {"text": text})

    def set_modes(self, text: str) -> int:
        parse_mode_text(text)
        return self._append("modes", {"text": text})

    # -- state -------------------------------------------------------------------

    @property
    def records(self) -> tuple[StoreRecord, ...]:
        return tuple(self._records)

    @property
    def is_empty(self) -> bool:
        return not self._records

    def windows(self) -> list[dict]:
        return [r.payload for r in self._records if r.kind == "window"]

    def get_hypothesis(self, version: int) -> Optional[Hypothesis]:
        """The version'th snapshot (1-based), or None if it does not exist."""
        count = 0
        for record in self._records:
            if record.kind == "hypothesis-snapshot":
                count += 1
                if count == version:
                    return Hypothesis.from_payload(record.payload)
        return None

    def load_state(self) -> StoreState:
        background_text = ""
        modes_text = ""
        window_payloads: list[dict] = []
        hypothesis_payload: Optional[dict] = None
        version = 0
        for record in self._records:
            if record.kind == "background":
                background_text = record.payload["text"]
            elif record.kind == "modes":
                modes_text = record.payload["text"]
            elif record.kind == "window":
                window_payloads.append(record.payload)
            else:
                hypothesis_payload = record.payload
                version += 1

        background = parse_program(background_text) if background_text else Program(())
        modes = tuple(parse_mode_text(modes_text)) if modes_text else ()
        heads = [d.predicate for d in modes if d.kind == "head"]
        windows = tuple(
            ExampleWindow.from_payload(p, head_predicates=heads)
            for p in window_payloads
        )
        hypothesis = (
            Hypothesis.from_payload(hypothesis_payload)
            if hypothesis_payload is not None
            else Hypothesis.empty()
        )
        return StoreState(
            background=background,
            modes=modes,
            background_text=background_text,
            modes_text=modes_text,
            windows=windows,
            hypothesis=hypothesis,
            hypothesis_version=version,
        )
