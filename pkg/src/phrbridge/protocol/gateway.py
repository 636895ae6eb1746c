"""In-process cross-chain gateway.

Routes serialized messages into per-node FIFO mailboxes and keeps a
metadata-only transcript.  It also carries the identity directory each
chain publishes (Hospital B's enrolled data users).
"""

from __future__ import annotations

import logging
import threading
from collections import deque

from ..errors import UnknownDestination
from ..models import TranscriptEntry
from .messages import Message, MessageType, decode_message, message_type

logger = logging.getLogger(__name__)


class Gateway:
    """Holds no key material: mailboxes, a transcript and public directories only."""

    def __init__(self) -> None:
        self._mailboxes: dict[str, deque[bytes]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._log: list[TranscriptEntry] = []
        self._log_lock = threading.Lock()
        self._directories: dict[str, frozenset[bytes]] = {}

    def register(self, name: str) -> None:
        if name in self._mailboxes:
            return
        self._mailboxes[name] = deque()
        self._locks[name] = threading.Lock()
        logger.debug(f"Gateway: registered node '{name}'")

    @property
    def nodes(self) -> list[str]:
        return sorted(self._mailboxes)

    def route(self, msg: Message | bytes, destination: str, source: str = "?") -> TranscriptEntry:
        """Deliver ``msg`` once into ``destination``'s mailbox and log its metadata."""
        if destination not in self._mailboxes:
            raise UnknownDestination(f"no node registered as '{destination}'")
        if isinstance(msg, bytes):
            data = msg
            parsed = decode_message(data)
        else:
            data = msg.to_bytes()
            parsed = msg
        entry = TranscriptEntry(
            source=source,
            destination=destination,
            msg_type=message_type(parsed).name,
            length=len(data),
            timestamp_ms=parsed.t_ms,
        )
        with self._locks[destination]:
            self._mailboxes[destination].append(data)
        with self._log_lock:
            self._log.append(entry)
        logger.info(f"Gateway: {entry.line()}")
        return entry

    def receive(self, name: str) -> bytes | None:
        """Pop the oldest message for ``name`` (None when empty)."""
        if name not in self._mailboxes:
            raise UnknownDestination(f"no node registered as '{name}'")
        with self._locks[name]:
            box = self._mailboxes[name]
            return box.popleft() if box else None

    def pending(self, name: str) -> int:
        if name not in self._mailboxes:
            raise UnknownDestination(f"no node registered as '{name}'")
        return len(self._mailboxes[name])

    def transcript(self) -> list[TranscriptEntry]:
        with self._log_lock:
            return list(self._log)

    def entries_of(self, kind: MessageType) -> list[TranscriptEntry]:
        return [e for e in self.transcript() if e.msg_type == kind.name]

    def publish_identities(self, chain: str, ids: frozenset[bytes] | set[bytes]) -> None:
        self._directories[chain] = frozenset(bytes(i) for i in ids)
        logger.info(f"Gateway: {chain} published {len(ids)} enrolled identities")

    def identities(self, chain: str) -> frozenset[bytes]:
        return self._directories.get(chain, frozenset())
