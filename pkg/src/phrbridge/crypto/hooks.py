"""Test-only observation of values the scheme never returns.

``capture_rekey_secrets`` exposes the target-group element X sampled inside
``rekeygen`` so tests can check X-recovery directly.  It refuses to run
unless the process was started with ``PHRBRIDGE_TEST_HOOKS=1``.
"""

from __future__ import annotations

import os
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .pairing import TargetElem

HOOKS_ENV = "PHRBRIDGE_TEST_HOOKS"

_CAPTURED: ContextVar[list[TargetElem] | None] = ContextVar("phrbridge_rekey_capture", default=None)


def hooks_enabled() -> bool:
    return os.getenv(HOOKS_ENV) == "1"


@contextmanager
def capture_rekey_secrets() -> Iterator[list[TargetElem]]:
    if not hooks_enabled():
        raise RuntimeError(f"test hooks are disabled (set {HOOKS_ENV}=1)")
    captured: list[TargetElem] = []
    token = _CAPTURED.set(captured)
    try:
        yield captured
    finally:
        _CAPTURED.reset(token)


def record_rekey_secret(x: TargetElem) -> None:
    captured = _CAPTURED.get()
    if captured is not None:
        captured.append(x)
