"""diskcache-based memo of hash-to-curve outputs."""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Any

import diskcache


class HashCache:
    """Persistent disk cache for H1/H2 outputs.

    Hash-to-curve is the slowest deterministic step the CLI repeats between
    runs (every command re-derives the identity keys it touches).  Entries are
    keyed by ``sha256(tag || len(tag) || input)`` and hold affine coordinates.
    Default TTL is 30 days.
    """

    def __init__(self, cache_dir: str | Path, default_ttl: int = 30 * 24 * 3600) -> None:
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._cache = diskcache.Cache(str(self.cache_dir), size_limit=256 * 1024 ** 2)  # 256MB
        self.default_ttl = default_ttl

    def _make_key(self, tag: bytes, data: bytes) -> str:
        h = hashlib.sha256()
        h.update(tag)
        h.update(len(tag).to_bytes(2, "big"))
        h.update(data)
        return h.hexdigest()

    def get(self, tag: bytes, data: bytes) -> Any | None:
        return self._cache.get(self._make_key(tag, data))

    def set(self, tag: bytes, data: bytes, value: Any, ttl: int | None = None) -> None:
        self._cache.set(self._make_key(tag, data), value, expire=ttl or self.default_ttl)

    def clear(self) -> None:
        self._cache.clear()

    def stats(self) -> dict[str, Any]:
        return {
            "size": len(self._cache),
            "volume": self._cache.volume(),
            "directory": str(self.cache_dir),
        }

    def close(self) -> None:
        self._cache.close()

    def __enter__(self) -> HashCache:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
