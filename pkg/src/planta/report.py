"""Stable machine-readable reports.

JSON documents with sorted keys and floats reduced to 6 significant
digits (shortest round-trip text), so identical inputs produce
byte-identical files across platforms.  Files are written atomically
(temp file + rename).  Every numeric field name carries its unit suffix.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

SCHEMA_VERSION = "1"


def round_floats(obj: Any) -> Any:
    """Recursively reduce floats to 6 significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(round_floats(doc), sort_keys=True, indent=2) + "\n"


def write_text_atomic(text: str, path: str | Path) -> None:
    """Atomic write: the target never holds a partial document."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(doc: dict, path: str | Path) -> None:
    write_text_atomic(dumps(doc), path)


def read_json(path: str | Path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        return json.load(fh)
