"""Wire codecs for the sharing messages.

Layout of every message::

    type (1) || timestamp ms (8, big-endian) || nonce (16) || fields

where each field is a 4-byte big-endian length followed by its bytes.

M1 travels hybrid-encrypted under the owner's key; its single field is the
envelope, and the header timestamp/nonce must equal the ones sealed inside.
M2, M3 and the hospital-to-relay job are sent in the clear.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

from ..crypto import wire
from ..crypto.hpre import ClcPublicKey, IbeSystemParams, ReEncryptionKey
from ..crypto.hybrid import HybridCiphertext, hybrid_decrypt_first, hybrid_encrypt
from ..crypto.pairing import IdElem, Rng
from ..errors import DecodeError, LengthError
from .freshness import NONCE_LEN

REQUEST1 = b"request1"
REQUEST2 = b"request2"
RESPOND1 = b"respond1"

HEADER_LEN = 1 + 8 + NONCE_LEN
FIELD_PREFIX_LEN = 4


class MessageType(IntEnum):
    M1 = 0x11
    M2 = 0x12
    M3 = 0x13
    RELAY_JOB = 0x14


def pack_fields(*fields: bytes) -> bytes:
    return b"".join(struct.pack(">I", len(f)) + bytes(f) for f in fields)


def unpack_fields(data: bytes, count: int, kind: str) -> list[bytes]:
    fields: list[bytes] = []
    pos = 0
    for _ in range(count):
        if pos + FIELD_PREFIX_LEN > len(data):
            raise LengthError(kind, pos + FIELD_PREFIX_LEN, len(data))
        (n,) = struct.unpack(">I", data[pos:pos + FIELD_PREFIX_LEN])
        pos += FIELD_PREFIX_LEN
        if pos + n > len(data):
            raise LengthError(kind, pos + n, len(data))
        fields.append(bytes(data[pos:pos + n]))
        pos += n
    if pos != len(data):
        raise LengthError(kind, pos, len(data))
    return fields


def _header(msg_type: MessageType, t_ms: int, nonce: bytes) -> bytes:
    if len(nonce) != NONCE_LEN:
        raise ValueError(f"nonce must be {NONCE_LEN} bytes")
    if not 0 <= t_ms < 2 ** 64:
        raise ValueError("timestamp out of range")
    return bytes([msg_type]) + struct.pack(">Q", t_ms) + nonce


def _split(data: bytes, expected: MessageType, count: int) -> tuple[int, bytes, list[bytes]]:
    data = bytes(data)
    if len(data) < HEADER_LEN:
        raise LengthError(expected.name, HEADER_LEN, len(data))
    if data[0] != expected:
        raise DecodeError(f"expected {expected.name} (0x{expected:02x}), got tag 0x{data[0]:02x}")
    (t_ms,) = struct.unpack(">Q", data[1:9])
    nonce = data[9:HEADER_LEN]
    return t_ms, nonce, unpack_fields(data[HEADER_LEN:], count, expected.name)


def _expect_label(got: bytes, label: bytes) -> None:
    if got != label:
        raise DecodeError(f"expected label {label.decode()}, got {got[:16]!r}")


def _u64(data: bytes, kind: str) -> int:
    if len(data) != 8:
        raise LengthError(kind, 8, len(data))
    return struct.unpack(">Q", data)[0]


@dataclass(frozen=True)
class AccessRequest:
    """Plaintext of M1: request1, pk_DO, pk_DU, T1, N1."""
    pk_do: IdElem
    pk_du: ClcPublicKey
    t_ms: int
    nonce: bytes

    def body(self) -> bytes:
        return pack_fields(
            REQUEST1,
            self.pk_do.to_bytes(),
            wire.encode(self.pk_du),
            struct.pack(">Q", self.t_ms),
            self.nonce,
        )

    @classmethod
    def from_body(cls, data: bytes) -> AccessRequest:
        label, pk_do, pk_du, t, nonce = unpack_fields(data, 5, "M1 body")
        _expect_label(label, REQUEST1)
        if len(nonce) != NONCE_LEN:
            raise LengthError("M1 nonce", NONCE_LEN, len(nonce))
        return cls(
            pk_do=IdElem.from_bytes(pk_do),
            pk_du=wire.decode_as(pk_du, ClcPublicKey),
            t_ms=_u64(t, "M1 timestamp"),
            nonce=nonce,
        )

    def seal(self, par1: IbeSystemParams, rng: Rng) -> SealedRequest:
        envelope = hybrid_encrypt(par1, self.pk_do, self.body(), rng)
        return SealedRequest(t_ms=self.t_ms, nonce=self.nonce, envelope=envelope)


@dataclass(frozen=True)
class SealedRequest:
    """M1 as it travels: header plus the hybrid envelope under pk_DO."""
    t_ms: int
    nonce: bytes
    envelope: HybridCiphertext

    def to_bytes(self) -> bytes:
        return _header(MessageType.M1, self.t_ms, self.nonce) + pack_fields(wire.encode(self.envelope))

    @classmethod
    def from_bytes(cls, data: bytes) -> SealedRequest:
        t_ms, nonce, (env,) = _split(data, MessageType.M1, 1)
        return cls(t_ms=t_ms, nonce=nonce, envelope=wire.decode_as(env, HybridCiphertext))

    def open(self, sk_do: IdElem) -> AccessRequest:
        """Decrypt and parse; raises AuthFailure, KeyMismatch or DecodeError."""
        request = AccessRequest.from_body(hybrid_decrypt_first(sk_do, self.envelope))
        if request.t_ms != self.t_ms or request.nonce != self.nonce:
            raise DecodeError("M1 header does not match the sealed timestamp/nonce")
        return request


@dataclass(frozen=True)
class SharingPermission:
    """M2: request2, pk_DO, pk_DU, rk_DO, T2, N2 plus the requested data id."""
    pk_do: IdElem
    pk_du: ClcPublicKey
    rk: ReEncryptionKey
    data_id: bytes
    t_ms: int
    nonce: bytes

    def to_bytes(self) -> bytes:
        return _header(MessageType.M2, self.t_ms, self.nonce) + pack_fields(
            REQUEST2,
            self.pk_do.to_bytes(),
            wire.encode(self.pk_du),
            wire.encode(self.rk),
            self.data_id,
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> SharingPermission:
        t_ms, nonce, (label, pk_do, pk_du, rk, data_id) = _split(data, MessageType.M2, 5)
        _expect_label(label, REQUEST2)
        return cls(
            pk_do=IdElem.from_bytes(pk_do),
            pk_du=wire.decode_as(pk_du, ClcPublicKey),
            rk=wire.decode_as(rk, ReEncryptionKey),
            data_id=data_id,
            t_ms=t_ms,
            nonce=nonce,
        )


@dataclass(frozen=True)
class SharingResponse:
    """M3: respond1, C_DU, T3, N3."""
    ct: HybridCiphertext
    t_ms: int
    nonce: bytes

    def to_bytes(self) -> bytes:
        return _header(MessageType.M3, self.t_ms, self.nonce) + pack_fields(RESPOND1, wire.encode(self.ct))

    @classmethod
    def from_bytes(cls, data: bytes) -> SharingResponse:
        t_ms, nonce, (label, ct) = _split(data, MessageType.M3, 2)
        _expect_label(label, RESPOND1)
        return cls(ct=wire.decode_as(ct, HybridCiphertext), t_ms=t_ms, nonce=nonce)


@dataclass(frozen=True)
class RelayJob:
    """Hospital A to relay: the owner's M2 and the stored first-level blob.

    The blob is kept as raw bytes; the relay decodes it itself.
    """
    m2: SharingPermission
    blob: bytes
    t_ms: int
    nonce: bytes

    def to_bytes(self) -> bytes:
        return _header(MessageType.RELAY_JOB, self.t_ms, self.nonce) + pack_fields(self.m2.to_bytes(), self.blob)

    @classmethod
    def from_bytes(cls, data: bytes) -> RelayJob:
        t_ms, nonce, (m2, blob) = _split(data, MessageType.RELAY_JOB, 2)
        return cls(m2=SharingPermission.from_bytes(m2), blob=blob, t_ms=t_ms, nonce=nonce)


Message = SealedRequest | SharingPermission | SharingResponse | RelayJob

_CODECS: dict[int, type] = {
    MessageType.M1: SealedRequest,
    MessageType.M2: SharingPermission,
    MessageType.M3: SharingResponse,
    MessageType.RELAY_JOB: RelayJob,
}


def message_type(msg: Message) -> MessageType:
    for tag, cls in _CODECS.items():
        if isinstance(msg, cls):
            return MessageType(tag)
    raise TypeError(f"not a protocol message: {type(msg).__name__}")


def decode_message(data: bytes) -> Message:
    if not data:
        raise LengthError("message", HEADER_LEN, 0)
    cls = _CODECS.get(data[0])
    if cls is None:
        raise DecodeError(f"unknown message tag 0x{data[0]:02x}")
    return cls.from_bytes(data)
