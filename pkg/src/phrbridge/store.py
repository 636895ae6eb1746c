"""Content-addressed blob store and hospital access list.

Blobs are addressed by their SHA-256 digest, standing in for an IPFS node.
The access list maps a data identifier to the blob address and the owner's
public key.  Both have an in-memory form for tests and an on-disk form for
the CLI.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, runtime_checkable

from .crypto.pairing import IdElem
from .errors import DecodeError, DigestMismatch, DuplicateDataId, NotFound, UnknownDataId

logger = logging.getLogger(__name__)

DIGEST_LEN = 32


@dataclass(frozen=True)
class ContentId:
    digest: bytes

    def __post_init__(self) -> None:
        if len(self.digest) != DIGEST_LEN:
            raise ValueError(f"content id must be {DIGEST_LEN} bytes, got {len(self.digest)}")

    @classmethod
    def of(cls, blob: bytes) -> ContentId:
        return cls(hashlib.sha256(blob).digest())

    @classmethod
    def from_hex(cls, text: str) -> ContentId:
        try:
            return cls(bytes.fromhex(text))
        except ValueError as exc:
            raise DecodeError(f"bad content id {text!r}: {exc}") from exc

    def hex(self) -> str:
        return self.digest.hex()

    def __str__(self) -> str:
        return self.hex()


@runtime_checkable
class BlobStore(Protocol):
    def put(self, blob: bytes) -> ContentId:
        ...

    def get(self, cid: ContentId) -> bytes:
        ...

    def __contains__(self, cid: object) -> bool:
        ...


def _verify(cid: ContentId, blob: bytes) -> bytes:
    if hashlib.sha256(blob).digest() != cid.digest:
        raise DigestMismatch(f"blob {cid} no longer matches its digest")
    return blob


class MemoryBlobStore:
    """Dict-backed store for tests and in-process simulations."""

    def __init__(self) -> None:
        self._blobs: dict[bytes, bytes] = {}
        self._lock = threading.Lock()

    def put(self, blob: bytes) -> ContentId:
        blob = bytes(blob)
        cid = ContentId.of(blob)
        with self._lock:
            self._blobs.setdefault(cid.digest, blob)
        logger.debug(f"Stored {len(blob)} bytes at {cid.hex()[:16]}")
        return cid

    def get(self, cid: ContentId) -> bytes:
        with self._lock:
            blob = self._blobs.get(cid.digest)
        if blob is None:
            raise NotFound(f"no blob at {cid}")
        return _verify(cid, blob)

    def __contains__(self, cid: object) -> bool:
        return isinstance(cid, ContentId) and cid.digest in self._blobs

    def __len__(self) -> int:
        return len(self._blobs)


class DirectoryBlobStore:
    """One file per blob, named by lowercase hex digest."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, cid: ContentId) -> Path:
        return self.root / cid.hex()

    def put(self, blob: bytes) -> ContentId:
        blob = bytes(blob)
        cid = ContentId.of(blob)
        path = self._path(cid)
        if path.exists():
            return cid
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(blob)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        logger.info(f"Stored {len(blob)} bytes at {cid}")
        return cid

    def get(self, cid: ContentId) -> bytes:
        try:
            blob = self._path(cid).read_bytes()
        except FileNotFoundError as exc:
            raise NotFound(f"no blob at {cid}") from exc
        return _verify(cid, blob)

    def __contains__(self, cid: object) -> bool:
        return isinstance(cid, ContentId) and self._path(cid).exists()


# ---------------------------------------------------------------------------
# Access list
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AccessListEntry:
    data_id: bytes
    address: ContentId
    owner_pk: IdElem

    def to_line(self) -> str:
        return f"{self.data_id.hex()} {self.address.hex()} {self.owner_pk.to_bytes().hex()}"

    @classmethod
    def from_line(cls, line: str) -> AccessListEntry:
        parts = line.split()
        if len(parts) != 3:
            raise DecodeError(f"access list line has {len(parts)} fields, expected 3")
        try:
            data_id = bytes.fromhex(parts[0])
            owner = bytes.fromhex(parts[2])
        except ValueError as exc:
            raise DecodeError(f"access list line is not hex: {exc}") from exc
        return cls(data_id=data_id, address=ContentId.from_hex(parts[1]), owner_pk=IdElem.from_bytes(owner))


class AccessList:
    """Hospital-side map data_id -> (address, owner_pk).

    With ``path`` set, entries are loaded on construction and appended on
    registration (one record per line).
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path is not None else None
        self._entries: dict[bytes, AccessListEntry] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    entry = AccessListEntry.from_line(line)
                    self._entries[entry.data_id] = entry
            logger.info(f"Loaded {len(self._entries)} access list entries from {self.path}")

    def register(self, data_id: bytes, address: ContentId, owner_pk: IdElem) -> AccessListEntry:
        entry = AccessListEntry(data_id=bytes(data_id), address=address, owner_pk=owner_pk)
        with self._lock:
            existing = self._entries.get(entry.data_id)
            if existing is not None:
                raise DuplicateDataId(f"data_id {entry.data_id.hex()} already registered")
            self._entries[entry.data_id] = entry
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as f:
                    f.write(entry.to_line() + "\n")
        logger.info(f"Registered data_id {entry.data_id.hex()} -> {address.hex()[:16]}")
        return entry

    def lookup(self, data_id: bytes) -> AccessListEntry:
        entry = self._entries.get(bytes(data_id))
        if entry is None:
            raise UnknownDataId(f"data_id {bytes(data_id).hex()} is not registered")
        return entry

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, data_id: object) -> bool:
        return isinstance(data_id, (bytes, bytearray)) and bytes(data_id) in self._entries


def register_access(access: AccessList, data_id: bytes, address: ContentId, owner_pk: IdElem) -> None:
    access.register(data_id, address, owner_pk)


def lookup_access(access: AccessList, data_id: bytes) -> AccessListEntry:
    return access.lookup(data_id)
