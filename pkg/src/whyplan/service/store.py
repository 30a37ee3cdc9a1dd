"""File-backed session store: one JSON document per session.

Desk scale by design; a directory of JSON files keeps sessions inspectable
and diffable. Per-session locks serialise mutations; the underlying task data
is immutable and shared.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from ..errors import UnknownSession
from .core import SessionState


class SessionStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.json"

    def lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def save(self, state: SessionState) -> None:
        self._path(state.session_id).write_text(json.dumps(state.to_record(), indent=1))

    def load(self, session_id: str) -> SessionState:
        path = self._path(session_id)
        if not path.exists():
            raise UnknownSession(session_id)
        return SessionState.from_record(json.loads(path.read_text()))

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()

    def list_ids(self) -> list[str]:
        records = []
        for path in self.root.glob("*.json"):
            try:
                data = json.loads(path.read_text())
                records.append((data.get("updated", ""), path.stem))
            except (OSError, json.JSONDecodeError):
                continue
        return [sid for _, sid in sorted(records)]

    def latest(self) -> str:
        ids = self.list_ids()
        if not ids:
            raise UnknownSession("(no sessions in workspace)")
        return ids[-1]
