"""Canonical JSON encoding shared by every artifact the tool writes.

Keys sorted, two-space indent, shortest round-trip floats, NaN/Inf rejected,
trailing newline. Identical inputs produce identical bytes, which is what the
determinism checks and golden files rely on.
"""

from __future__ import annotations

import json
from pathlib import Path


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_canonical(path: Path, obj) -> bytes:
    data = canonical_dumps(obj).encode("utf-8")
    Path(path).write_bytes(data)
    return data
