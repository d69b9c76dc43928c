"""Append-only session event log on disk.

One JSONL file per session: a header line with session metadata, then one
event per line with a dense, monotonically increasing ``seq``. Events are
immutable once written; every read replays the full file.
"""
from __future__ import annotations

import json
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

__all__ = ["EventLogError", "SessionStore"]

EVENT_KINDS = ("generate_click", "add_click", "edit", "submit")


class EventLogError(ValueError):
    pass


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _path(self, session_id: str) -> Path:
        if not session_id.replace("-", "").isalnum():
            raise EventLogError(f"invalid session id {session_id!r}")
        return self.root / f"{session_id}.jsonl"

    def lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def create_session(self, mode: str) -> str:
        session_id = uuid.uuid4().hex
        header = {
            "session_id": session_id,
            "mode": mode,
            "created_at": datetime.now(timezone.utc).isoformat(),
        }
        path = self._path(session_id)
        with open(path, "x", encoding="utf-8") as fh:
            fh.write(json.dumps(header, ensure_ascii=False, sort_keys=True) + "\n")
        return session_id

    def exists(self, session_id: str) -> bool:
        try:
            return self._path(session_id).exists()
        except EventLogError:
            return False

    def read(self, session_id: str) -> tuple[dict, list[dict]]:
        """Header and events; validates seq density and event kinds."""
        path = self._path(session_id)
        if not path.exists():
            raise EventLogError(f"unknown session {session_id!r}")
        return read_log(path)

    def append(self, session_id: str, kind: str, payload: dict) -> int:
        """Append one event, returning its seq. Caller holds the session lock."""
        if kind not in EVENT_KINDS:
            raise EventLogError(f"unknown event kind {kind!r}")
        _, events = self.read(session_id)
        seq = len(events) + 1
        record = {"seq": seq, "kind": kind, "payload": payload}
        with open(self._path(session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
        return seq

    def sessions(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.jsonl"))


def read_log(path: str | Path) -> tuple[dict, list[dict]]:
    """Read a session log file into (header, events)."""
    header: dict | None = None
    events: list[dict] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EventLogError(f"{path}:{lineno}: invalid JSON") from exc
            if lineno == 1:
                if "session_id" not in record or "mode" not in record:
                    raise EventLogError(f"{path}: missing session header")
                header = record
                continue
            for key in ("seq", "kind", "payload"):
                if key not in record:
                    raise EventLogError(f"{path}:{lineno}: event missing {key!r}")
            if record["kind"] not in EVENT_KINDS:
                raise EventLogError(f"{path}: seq {record['seq']}: unknown kind {record['kind']!r}")
            if record["seq"] != len(events) + 1:
                raise EventLogError(
                    f"{path}: seq {record['seq']} out of order (expected {len(events) + 1})"
                )
            events.append(record)
    if header is None:
        raise EventLogError(f"{path}: empty session log")
    return header, events
