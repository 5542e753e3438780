"""Persistent JSON cache of intersection counts keyed by ``genus|w|v``."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class IntersectionCache:
    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self.entries: dict[str, dict] = {}
        self.dirty = False
        if self.path is not None:
            self.load()

    @staticmethod
    def key(genus: int, w: str, v: str) -> str:
        return f"{genus}|{w}|{v}"

    def load(self) -> None:
        self.entries = {}
        if self.path is None or not self.path.exists():
            return
        try:
            data = json.loads(self.path.read_text())
            if data.get("schema_version") != SCHEMA_VERSION:
                raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
            entries = data["entries"]
            for k, val in entries.items():
                if not isinstance(val, dict) or not {"count", "radius_used"} <= val.keys():
                    raise ValueError(f"bad cache entry {k!r}")
            self.entries = dict(entries)
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            log.warning("intersection cache %s is corrupted (%s); rebuilding", self.path, exc)
            self.entries = {}
            self.dirty = True

    def get(self, genus: int, w: str, v: str) -> dict | None:
        return self.entries.get(self.key(genus, w, v))

    def put(self, genus: int, w: str, v: str, count: int, radius_used: int) -> None:
        k = self.key(genus, w, v)
        val = {"count": int(count), "radius_used": int(radius_used)}
        if self.entries.get(k) != val:
            self.entries[k] = val
            self.dirty = True

    def invalidate(self, genus: int) -> int:
        prefix = f"{genus}|"
        doomed = [k for k in self.entries if k.startswith(prefix)]
        for k in doomed:
            del self.entries[k]
        self.dirty = self.dirty or bool(doomed)
        return len(doomed)

    def save(self) -> None:
        if self.path is None or not self.dirty:
            return
        payload = {"schema_version": SCHEMA_VERSION,
                   "entries": dict(sorted(self.entries.items()))}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".cache-")
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, self.path)
        self.dirty = False

    def __len__(self) -> int:
        return len(self.entries)
