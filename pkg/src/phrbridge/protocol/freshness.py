"""Timestamp window plus single-use nonce cache."""

from __future__ import annotations

import heapq
import logging
import threading
from dataclasses import dataclass, field

from ..errors import NonceCacheFull, Replay, Stale

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_MS = 120_000
DEFAULT_CAPACITY = 2 ** 16
NONCE_LEN = 16


@dataclass
class FreshnessPolicy:
    """Per-verifier freshness state.

    A message is stale if its timestamp is more than ``window_ms`` away from
    the verifier's clock in either direction.  An accepted nonce is kept until
    ``max(t, now) + window_ms``, after which its timestamp alone would be
    rejected, so eviction never reopens a replay.
    """
    window_ms: int = DEFAULT_WINDOW_MS
    capacity: int = DEFAULT_CAPACITY

    _seen: dict[bytes, int] = field(init=False, default_factory=dict)
    _expiry: list[tuple[int, bytes]] = field(init=False, default_factory=list)
    _lock: threading.Lock = field(init=False, default_factory=threading.Lock)

    def __post_init__(self) -> None:
        if self.window_ms < 0:
            raise ValueError("window must be non-negative")
        if self.capacity <= 0:
            raise ValueError("nonce cache capacity must be positive")

    @classmethod
    def from_seconds(cls, window_s: float, capacity: int = DEFAULT_CAPACITY) -> FreshnessPolicy:
        return cls(window_ms=int(round(window_s * 1000)), capacity=capacity)

    def _evict(self, now_ms: int) -> None:
        while self._expiry and self._expiry[0][0] < now_ms:
            expires, nonce = heapq.heappop(self._expiry)
            if self._seen.get(nonce) == expires:
                del self._seen[nonce]

    def check(self, t_ms: int, nonce: bytes, now_ms: int) -> None:
        """Accept (t, nonce) once; raise Stale, Replay or NonceCacheFull otherwise."""
        if abs(now_ms - t_ms) > self.window_ms:
            raise Stale(f"timestamp {t_ms} is {now_ms - t_ms} ms from now (window {self.window_ms} ms)")
        nonce = bytes(nonce)
        with self._lock:
            self._evict(now_ms)
            if nonce in self._seen:
                raise Replay(f"nonce {nonce.hex()} already seen")
            if len(self._seen) >= self.capacity:
                logger.warning(f"Nonce cache full ({self.capacity} entries), refusing message")
                raise NonceCacheFull(f"nonce cache holds {self.capacity} unexpired entries")
            expires = max(t_ms, now_ms) + self.window_ms
            self._seen[nonce] = expires
            heapq.heappush(self._expiry, (expires, nonce))

    def __len__(self) -> int:
        return len(self._seen)
