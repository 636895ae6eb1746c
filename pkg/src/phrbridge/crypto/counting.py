"""Per-context tally of expensive group operations.

The pairing facade calls :func:`tick` on every pairing, exponentiation,
hash-to-curve evaluation and target-group multiplication.  Nothing is
recorded unless a caller has opened :func:`count_operations`, so the
production path pays only a context-variable lookup.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar

from ..models import OpCounters

_ACTIVE: ContextVar[Counter[str] | None] = ContextVar("phrbridge_op_tally", default=None)


class OpTally:
    """Live view over the counters of an open :func:`count_operations` block."""

    def __init__(self, counter: Counter[str]) -> None:
        self._counter = counter

    def snapshot(self) -> OpCounters:
        return OpCounters(**{name: self._counter.get(name, 0) for name in OpCounters.model_fields})


def tick(name: str, amount: int = 1) -> None:
    counter = _ACTIVE.get()
    if counter is not None:
        counter[name] += amount


@contextmanager
def count_operations() -> Iterator[OpTally]:
    """Count group operations executed inside the ``with`` block."""
    counter: Counter[str] = Counter()
    token = _ACTIVE.set(counter)
    try:
        yield OpTally(counter)
    finally:
        _ACTIVE.reset(token)
