"""JSON report serialisation and file digests."""

from __future__ import annotations

import hashlib
import json
import math
import os

import numpy as np

from .ingest import atomic_write_text

SCHEMA_VERSION = 1


def to_jsonable(obj):
    """Convert numpy/scalar containers to JSON types.

    Floats are rounded to 12 significant digits; NaN and infinities become
    null.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.issubdtype(obj.dtype, np.datetime64):
            return [str(d) for d in obj.astype("datetime64[D]")]
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        return float(f"{v:.12g}")
    if isinstance(obj, np.datetime64):
        return str(obj.astype("datetime64[D]"))
    return obj


def dumps(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION}
    body.update(payload)
    return json.dumps(to_jsonable(body), indent=2, ensure_ascii=False) + "\n"


def write_json(path, payload: dict) -> None:
    atomic_write_text(path, dumps(payload))


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def manifest(paths, root) -> list[dict]:
    """Sorted ``[{"file", "sha256", "bytes"}]`` entries relative to ``root``."""
    entries = []
    for p in sorted(set(os.fspath(p) for p in paths)):
        entries.append(
            {
                "file": os.path.relpath(p, root),
                "sha256": file_digest(p),
                "bytes": os.path.getsize(p),
            }
        )
    entries.sort(key=lambda e: e["file"])
    return entries
