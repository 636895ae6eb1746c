"""Injectable millisecond clocks."""

from __future__ import annotations

import threading
import time
from typing import Protocol, runtime_checkable


@runtime_checkable
class Clock(Protocol):
    def now_ms(self) -> int:
        ...


class SystemClock:
    """Wall clock, milliseconds since the Unix epoch."""

    def now_ms(self) -> int:
        return time.time_ns() // 1_000_000


class ManualClock:
    """Test/demo clock.

    Every ``now_ms()`` call returns the current value and then advances it by
    ``tick_ms``, so a seeded run produces the same timestamps every time.
    """

    def __init__(self, start_ms: int = 1_700_000_000_000, tick_ms: int = 0) -> None:
        if start_ms < 0 or tick_ms < 0:
            raise ValueError("clock values must be non-negative")
        self._now = start_ms
        self.tick_ms = tick_ms
        self._lock = threading.Lock()

    def now_ms(self) -> int:
        with self._lock:
            value = self._now
            self._now += self.tick_ms
            return value

    def peek(self) -> int:
        return self._now

    def advance(self, ms: int) -> None:
        if ms < 0:
            raise ValueError("cannot move a clock backwards")
        with self._lock:
            self._now += ms

    def set(self, ms: int) -> None:
        with self._lock:
            self._now = ms
