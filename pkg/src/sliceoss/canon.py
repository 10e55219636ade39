"""Canonical JSON serialization and timestamp helpers.

Every payload that crosses a module boundary (REST bodies, event log lines,
snapshots) is encoded the same way: UTF-8 JSON, keys sorted lexicographically,
no insignificant whitespace.  Two structurally equal values therefore always
produce byte-identical encodings.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Any


def canonical_dumps(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(value: Any) -> bytes:
    return canonical_dumps(value).encode("utf-8")


def canonical_loads(text: str | bytes) -> Any:
    return json.loads(text)


def now_utc() -> datetime:
    return datetime.now(timezone.utc)


def format_ts(moment: datetime) -> str:
    # RFC 3339 with a trailing Z; microseconds kept for ordering stability.
    return moment.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(text: str) -> datetime:
    # fromisoformat in 3.10 does not accept the Z suffix.
    return datetime.fromisoformat(text.replace("Z", "+00:00"))
