"""Content-hashed disk cache: one JSON file per entry, atomic writes.

Layout: <root>/<kind>/<k>/<n>.json (a modulus tag joins the filename
when present).  A hit is only served when the stored sha256 matches the
canonical serialisation of the value, so corrupted entries degrade to
recomputation instead of wrong answers.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path


def _canonical(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _digest(value) -> str:
    return hashlib.sha256(_canonical(value).encode()).hexdigest()


class Cache:
    def __init__(self, root):
        self.root = Path(root)

    def _path(self, key) -> Path:
        kind, k, n, modulus = key
        name = f"{n}.json" if modulus is None else f"{n}__{modulus}.json"
        return self.root / str(kind) / str(k) / name

    def get(self, key):
        path = self._path(key)
        try:
            with open(path, "r", encoding="utf-8") as f:
                entry = json.load(f)
        except (OSError, json.JSONDecodeError):
            return None
        value = entry.get("value")
        if entry.get("sha256") != _digest(value):
            return None
        return value

    def put(self, key, value) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "key": list(key),
            "sha256": _digest(value),
            "value": value,
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(_canonical(entry))
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def get_or_compute(self, key, compute):
        value = self.get(key)
        if value is not None:
            return value
        value = compute()
        self.put(key, value)
        return value

    def gc(self, purge_all: bool = False) -> tuple[int, int]:
        """Drop corrupt entries (or everything); returns (kept, removed)."""
        kept = removed = 0
        if not self.root.exists():
            return 0, 0
        for path in sorted(self.root.rglob("*.json")):
            ok = False
            if not purge_all:
                try:
                    with open(path, "r", encoding="utf-8") as f:
                        entry = json.load(f)
                    ok = entry.get("sha256") == _digest(entry.get("value"))
                except (OSError, json.JSONDecodeError):
                    ok = False
            if ok:
                kept += 1
            else:
                path.unlink()
                removed += 1
        return kept, removed


def cached_hecke_matrix(cache, k: int, n: int):
    """Hecke matrix through the cache (or straight through when cache is None)."""
    from .qexp import HeckeMatrix, hecke_matrix

    if cache is None:
        return hecke_matrix(k, n)
    value = cache.get_or_compute(
        ("hecke", k, n, None), lambda: hecke_matrix(k, n).to_json_dict()
    )
    return HeckeMatrix.from_json_dict(value)
