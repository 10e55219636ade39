"""Durable storage: append-only event log plus a snapshot file.

The log holds one canonical JSON record per line: ``event`` records as they
are published and ``ack`` records once a batch has been fully delivered and
the snapshot that contains its effects has been written.  On restart,
events without an ack are redelivered.  Any unparseable or malformed line
means the files were damaged and the store refuses to load; it never
truncates or repairs on its own.
"""

from __future__ import annotations

import os
from pathlib import Path

from .canon import canonical_dumps, canonical_loads
from .errors import CorruptStore

LOG_NAME = "events.log"
SNAPSHOT_NAME = "snapshot.json"


class EventStore:
    """File-backed when given a directory, otherwise purely in memory."""

    def __init__(self, data_dir: Path | str | None = None):
        self.data_dir = Path(data_dir) if data_dir else None
        self._memory_log: list[dict] = []
        self._memory_snapshot: dict | None = None
        self._log_handle = None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)

    @property
    def log_path(self) -> Path | None:
        return self.data_dir / LOG_NAME if self.data_dir else None

    @property
    def snapshot_path(self) -> Path | None:
        return self.data_dir / SNAPSHOT_NAME if self.data_dir else None

    # -- log ---------------------------------------------------------------

    def _append_line(self, record: dict) -> None:
        if self.data_dir is None:
            self._memory_log.append(record)
            return
        if self._log_handle is None:
            self._log_handle = open(self.log_path, "a", encoding="utf-8")
        self._log_handle.write(canonical_dumps(record) + "\n")
        # Flush through to the OS so a killed process loses nothing.
        self._log_handle.flush()
        os.fsync(self._log_handle.fileno())

    def append_event(self, event: dict) -> None:
        self._append_line({"type": "event", "event": event})

    def append_acks(self, event_ids: list[str]) -> None:
        for event_id in event_ids:
            self._append_line({"type": "ack", "eventId": event_id})

    def read_log(self) -> list[dict]:
        """All records in append order; CorruptStore on any damaged line."""
        if self.data_dir is None:
            return list(self._memory_log)
        if not self.log_path.exists():
            return []
        records = []
        with open(self.log_path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                stripped = line.strip()
                if not stripped:
                    continue
                try:
                    record = canonical_loads(stripped)
                except ValueError:
                    raise CorruptStore(
                        f"event log line {lineno} is not valid JSON"
                    ) from None
                if not isinstance(record, dict) or record.get("type") not in ("event", "ack"):
                    raise CorruptStore(f"event log line {lineno} has an unknown shape")
                if record["type"] == "event" and "event" not in record:
                    raise CorruptStore(f"event log line {lineno} is missing its event body")
                if record["type"] == "ack" and "eventId" not in record:
                    raise CorruptStore(f"event log line {lineno} is missing its event id")
                records.append(record)
        return records

    def events(self) -> list[dict]:
        return [r["event"] for r in self.read_log() if r["type"] == "event"]

    def unacked_events(self) -> list[dict]:
        """Events with no ack record, in original publish order."""
        acked = set()
        events = []
        for record in self.read_log():
            if record["type"] == "ack":
                acked.add(record["eventId"])
            else:
                events.append(record["event"])
        return [e for e in events if e["eventId"] not in acked]

    # -- snapshot ------------------------------------------------------------

    def write_snapshot(self, state: dict) -> None:
        if self.data_dir is None:
            self._memory_snapshot = canonical_loads(canonical_dumps(state))
            return
        tmp = self.snapshot_path.with_suffix(".tmp")
        tmp.write_text(canonical_dumps(state), encoding="utf-8")
        os.replace(tmp, self.snapshot_path)

    def read_snapshot(self) -> dict | None:
        if self.data_dir is None:
            return self._memory_snapshot
        if not self.snapshot_path.exists():
            return None
        try:
            state = canonical_loads(self.snapshot_path.read_text(encoding="utf-8"))
        except ValueError:
            raise CorruptStore("snapshot file is not valid JSON") from None
        if not isinstance(state, dict):
            raise CorruptStore("snapshot file has an unknown shape")
        return state

    def close(self) -> None:
        if self._log_handle is not None:
            self._log_handle.close()
            self._log_handle = None
