"""Byte formats for keys, parameters and ciphertexts.

Every object is a 1-byte type tag followed by the canonical encodings of its
elements in a fixed order.  Identities trail as a 2-byte big-endian length
plus bytes; the hybrid envelope nests its tagged KEM, then the 12-byte DEM
nonce, a 4-byte big-endian DEM length and the DEM bytes.
"""

from __future__ import annotations

import struct
from enum import IntEnum
from typing import Any, TypeVar

from ..errors import DecodeError, LengthError
from .hpre import (
    ClcKeyPair,
    ClcMasterKey,
    ClcPartialKey,
    ClcPublicKey,
    ClcSystemParams,
    FirstLevelCiphertext,
    IbeKeyPair,
    IbeMasterKey,
    IbePublicKey,
    IbeSystemParams,
    ReEncryptionKey,
    SecondLevelCiphertext,
)
from .hybrid import DEM_NONCE_LEN, HybridCiphertext
from .pairing import (
    BASE_LEN,
    ID_LEN,
    SCALAR_LEN,
    TARGET_LEN,
    BaseElem,
    IdElem,
    TargetElem,
    get_context,
    scalar_from_bytes,
    scalar_to_bytes,
)

T = TypeVar("T")


class WireTag(IntEnum):
    IBE_PUBLIC = 0x01
    CLC_PUBLIC = 0x02
    FIRST_LEVEL = 0x03
    REKEY = 0x04
    SECOND_LEVEL = 0x05
    HYBRID = 0x06
    IBE_PRIVATE = 0x07
    CLC_PRIVATE = 0x08
    IBE_PARAMS = 0x09
    CLC_PARAMS = 0x0A
    IBE_MASTER = 0x0B
    CLC_MASTER = 0x0C
    CLC_PARTIAL = 0x0D


FIRST_LEVEL_LEN = 1 + BASE_LEN + TARGET_LEN
SECOND_LEVEL_LEN = 1 + 2 * BASE_LEN + 2 * TARGET_LEN
REKEY_LEN = 1 + ID_LEN + BASE_LEN + TARGET_LEN
CLC_PUBLIC_LEN = 1 + ID_LEN + BASE_LEN


class _Reader:
    """Cursor over an encoding; every read is bounds-checked."""

    def __init__(self, data: bytes, kind: str) -> None:
        self.data = bytes(data)
        self.kind = kind
        self.pos = 0

    def take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.data):
            raise LengthError(self.kind, end, len(self.data))
        chunk = self.data[self.pos:end]
        self.pos = end
        return chunk

    def base(self) -> BaseElem:
        return BaseElem.from_bytes(self.take(BASE_LEN))

    def ident(self) -> IdElem:
        return IdElem.from_bytes(self.take(ID_LEN))

    def target(self) -> TargetElem:
        return TargetElem.from_bytes(self.take(TARGET_LEN))

    def scalar(self) -> int:
        return scalar_from_bytes(self.take(SCALAR_LEN))

    def u16_bytes(self) -> bytes:
        (n,) = struct.unpack(">H", self.take(2))
        return self.take(n)

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise LengthError(self.kind, self.pos, len(self.data))


def _u16(data: bytes) -> bytes:
    if len(data) > 0xFFFF:
        raise ValueError("identity longer than 65535 bytes")
    return struct.pack(">H", len(data)) + data


def encode(obj: Any) -> bytes:
    """Serialize any key, parameter set or ciphertext to its tagged wire form."""
    if isinstance(obj, IbePublicKey):
        return bytes([WireTag.IBE_PUBLIC]) + obj.pk.to_bytes() + _u16(obj.id)
    if isinstance(obj, ClcPublicKey):
        return bytes([WireTag.CLC_PUBLIC]) + obj.pk1.to_bytes() + obj.pk2.to_bytes()
    if isinstance(obj, FirstLevelCiphertext):
        return bytes([WireTag.FIRST_LEVEL]) + obj.c1.to_bytes() + obj.c2.to_bytes()
    if isinstance(obj, ReEncryptionKey):
        return bytes([WireTag.REKEY]) + obj.rk1.to_bytes() + obj.rk2.to_bytes() + obj.rk3.to_bytes()
    if isinstance(obj, SecondLevelCiphertext):
        return (bytes([WireTag.SECOND_LEVEL]) + obj.C1.to_bytes() + obj.C2.to_bytes()
                + obj.C3.to_bytes() + obj.C4.to_bytes())
    if isinstance(obj, HybridCiphertext):
        if len(obj.dem_nonce) != DEM_NONCE_LEN:
            raise ValueError("DEM nonce must be 12 bytes")
        return (bytes([WireTag.HYBRID]) + encode(obj.kem) + obj.dem_nonce
                + struct.pack(">I", len(obj.dem)) + obj.dem)
    if isinstance(obj, IbeKeyPair):
        return bytes([WireTag.IBE_PRIVATE]) + obj.pk.to_bytes() + obj.sk.to_bytes() + _u16(obj.id)
    if isinstance(obj, ClcKeyPair):
        return (bytes([WireTag.CLC_PRIVATE]) + obj.pk1.to_bytes() + obj.pk2.to_bytes()
                + obj.sk.to_bytes() + _u16(obj.id))
    if isinstance(obj, IbeSystemParams):
        return bytes([WireTag.IBE_PARAMS]) + obj.h1.to_bytes()
    if isinstance(obj, ClcSystemParams):
        return bytes([WireTag.CLC_PARAMS]) + obj.h2.to_bytes()
    if isinstance(obj, IbeMasterKey):
        return bytes([WireTag.IBE_MASTER]) + scalar_to_bytes(obj.s)
    if isinstance(obj, ClcMasterKey):
        return bytes([WireTag.CLC_MASTER]) + scalar_to_bytes(obj.y)
    if isinstance(obj, ClcPartialKey):
        return bytes([WireTag.CLC_PARTIAL]) + obj.d.to_bytes() + _u16(obj.id)
    raise TypeError(f"no wire format for {type(obj).__name__}")


def _decode_body(tag: WireTag, r: _Reader) -> Any:
    if tag is WireTag.IBE_PUBLIC:
        pk = r.ident()
        return IbePublicKey(id=r.u16_bytes(), pk=pk)
    if tag is WireTag.CLC_PUBLIC:
        return ClcPublicKey(pk1=r.ident(), pk2=r.base())
    if tag is WireTag.FIRST_LEVEL:
        return FirstLevelCiphertext(c1=r.base(), c2=r.target())
    if tag is WireTag.REKEY:
        return ReEncryptionKey(rk1=r.ident(), rk2=r.base(), rk3=r.target())
    if tag is WireTag.SECOND_LEVEL:
        return SecondLevelCiphertext(C1=r.base(), C2=r.target(), C3=r.base(), C4=r.target())
    if tag is WireTag.HYBRID:
        inner = r.take(1)
        if inner[0] == WireTag.FIRST_LEVEL:
            kem: Any = FirstLevelCiphertext(c1=r.base(), c2=r.target())
        elif inner[0] == WireTag.SECOND_LEVEL:
            kem = SecondLevelCiphertext(C1=r.base(), C2=r.target(), C3=r.base(), C4=r.target())
        else:
            raise DecodeError(f"hybrid envelope: unexpected KEM tag 0x{inner[0]:02x}")
        nonce = r.take(DEM_NONCE_LEN)
        (dem_len,) = struct.unpack(">I", r.take(4))
        return HybridCiphertext(kem=kem, dem=r.take(dem_len), dem_nonce=nonce)
    if tag is WireTag.IBE_PRIVATE:
        pk, sk = r.ident(), r.ident()
        return IbeKeyPair(id=r.u16_bytes(), pk=pk, sk=sk)
    if tag is WireTag.CLC_PRIVATE:
        pk1, pk2, sk = r.ident(), r.base(), r.ident()
        return ClcKeyPair(id=r.u16_bytes(), pk1=pk1, pk2=pk2, sk=sk)
    if tag is WireTag.IBE_PARAMS:
        return IbeSystemParams(ctx=get_context(), h1=r.base())
    if tag is WireTag.CLC_PARAMS:
        return ClcSystemParams(ctx=get_context(), h2=r.base())
    if tag is WireTag.IBE_MASTER:
        return IbeMasterKey(r.scalar())
    if tag is WireTag.CLC_MASTER:
        return ClcMasterKey(r.scalar())
    if tag is WireTag.CLC_PARTIAL:
        d = r.ident()
        return ClcPartialKey(id=r.u16_bytes(), d=d)
    raise DecodeError(f"unhandled tag {tag!r}")


def decode(data: bytes) -> Any:
    """Parse any tagged wire object; raises DecodeError/LengthError on bad input."""
    data = bytes(data)
    if not data:
        raise LengthError("wire object", 1, 0)
    try:
        tag = WireTag(data[0])
    except ValueError as exc:
        raise DecodeError(f"unknown wire tag 0x{data[0]:02x}") from exc
    r = _Reader(data[1:], tag.name)
    try:
        obj = _decode_body(tag, r)
    except (ValueError, struct.error) as exc:
        if isinstance(exc, DecodeError):
            raise
        raise DecodeError(f"{tag.name}: {exc}") from exc
    r.finish()
    return obj


def decode_as(data: bytes, cls: type[T]) -> T:
    obj = decode(data)
    if not isinstance(obj, cls):
        raise DecodeError(f"expected {cls.__name__}, got {type(obj).__name__}")
    return obj
