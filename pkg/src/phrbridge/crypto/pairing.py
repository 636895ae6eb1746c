"""Symmetric-notation pairing facade over the asymmetric BLS12-381 pairing.

The scheme is written for a symmetric pairing e: G1 x G1 -> G2.  We run it
on a Type-3 curve by fixing a slot assignment:

* ``BaseElem`` lives in the first source group (py_ecc G1): the generator g,
  system keys h1/h2 and every power of g.
* ``IdElem`` lives in the second source group (py_ecc G2): every H1/H2
  output and its powers.
* ``TargetElem`` lives in GT, the order-q subgroup of Fq12.

Every pairing the scheme evaluates takes one argument from each slot, so the
correctness algebra carries over unchanged.  All groups are written
multiplicatively: ``a * b`` is the group operation, ``a ** k`` is
exponentiation and ``a.inverse()`` the group inverse.
"""

from __future__ import annotations

import hashlib
import logging
import random
import secrets
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import TYPE_CHECKING, Any, ClassVar, Protocol, TypeVar, runtime_checkable

from py_ecc.bls.hash_to_curve import hash_to_G2
from py_ecc.bls.point_compression import compress_G1, compress_G2, decompress_G1, decompress_G2
from py_ecc.optimized_bls12_381 import (
    FQ2,
    FQ12,
    G1,
    G2,
    Z1,
    Z2,
    add,
    b2,
    curve_order,
    eq,
    field_modulus,
    is_inf,
    is_on_curve,
    multiply,
    neg,
    normalize,
)
from py_ecc.optimized_bls12_381 import pairing as _ate_pairing

from ..errors import DecodeError, LengthError
from .counting import tick

if TYPE_CHECKING:
    from ..cache import HashCache

logger = logging.getLogger(__name__)

CURVE_NAME = "bls12_381"
CURVE_ORDER: int = curve_order
FIELD_MODULUS: int = field_modulus

H1_TAG = b"HPRE-H1"
H2_TAG = b"HPRE-H2"

BASE_LEN = 48
ID_LEN = 96
FQ_LEN = 48
TARGET_LEN = 12 * FQ_LEN
SCALAR_LEN = 32

Scalar = int
"""Integer modulo the group order q (``0 <= s < q``)."""


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------


@runtime_checkable
class Rng(Protocol):
    """Randomness handle passed explicitly to every randomized operation."""

    def randbelow(self, n: int) -> int:
        ...

    def token_bytes(self, n: int) -> bytes:
        ...


class SystemRng:
    """Cryptographic randomness from the OS."""

    def randbelow(self, n: int) -> int:
        return secrets.randbelow(n)

    def token_bytes(self, n: int) -> bytes:
        return secrets.token_bytes(n)


class SeededRng:
    """Deterministic randomness for tests and reproducible demos. Not for production keys."""

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self._random = random.Random(seed)

    def randbelow(self, n: int) -> int:
        return self._random.randrange(n)

    def token_bytes(self, n: int) -> bytes:
        return self._random.randbytes(n)


def make_rng(seed: int | None = None) -> Rng:
    return SystemRng() if seed is None else SeededRng(seed)


def random_scalar(rng: Rng) -> Scalar:
    """Uniform nonzero scalar in [1, q-1]."""
    return rng.randbelow(CURVE_ORDER - 1) + 1


def scalar_inverse(s: Scalar) -> Scalar:
    if s % CURVE_ORDER == 0:
        raise ZeroDivisionError("zero scalar has no inverse")
    return pow(s, -1, CURVE_ORDER)


def scalar_to_bytes(s: Scalar) -> bytes:
    if not 0 <= s < CURVE_ORDER:
        raise ValueError("scalar out of range")
    return s.to_bytes(SCALAR_LEN, "big")


def scalar_from_bytes(data: bytes) -> Scalar:
    if len(data) != SCALAR_LEN:
        raise LengthError("Scalar", SCALAR_LEN, len(data))
    value = int.from_bytes(data, "big")
    if value >= CURVE_ORDER:
        raise DecodeError("Scalar: value not reduced modulo the group order")
    return value


# ---------------------------------------------------------------------------
# Group elements
# ---------------------------------------------------------------------------

E = TypeVar("E", bound="_CurveElem")


def _in_subgroup(point: Any) -> bool:
    return is_inf(multiply(point, CURVE_ORDER))


@dataclass(frozen=True, eq=False)
class _CurveElem:
    """Element of an elliptic-curve source group (projective py_ecc point)."""

    point: Any

    _kind: ClassVar[str]
    _exp_counter: ClassVar[str]
    _identity_point: ClassVar[Any]
    encoded_len: ClassVar[int]

    @classmethod
    def identity(cls: type[E]) -> E:
        return cls(cls._identity_point)

    def is_identity(self) -> bool:
        return is_inf(self.point)

    def __mul__(self: E, other: E) -> E:
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(add(self.point, other.point))

    def __pow__(self: E, k: int) -> E:
        tick(self._exp_counter)
        return type(self)(multiply(self.point, k % CURVE_ORDER))

    def inverse(self: E) -> E:
        return type(self)(neg(self.point))

    def __truediv__(self: E, other: E) -> E:
        if type(other) is not type(self):
            return NotImplemented
        return self * other.inverse()

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        a, b = self.point, other.point  # type: ignore[attr-defined]
        if is_inf(a) or is_inf(b):
            return is_inf(a) and is_inf(b)
        return eq(a, b)

    def __hash__(self) -> int:
        return hash((self._kind, self.to_bytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_bytes().hex()[:16]}…)"

    def to_bytes(self) -> bytes:
        raise NotImplementedError

    @classmethod
    def from_bytes(cls: type[E], data: bytes) -> E:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class BaseElem(_CurveElem):
    """First source slot: g and all powers of g (48-byte compressed G1)."""

    _kind: ClassVar[str] = "BaseElem"
    _exp_counter: ClassVar[str] = "base_exps"
    _identity_point: ClassVar[Any] = Z1
    encoded_len: ClassVar[int] = BASE_LEN

    def to_bytes(self) -> bytes:
        return compress_G1(self.point).to_bytes(BASE_LEN, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> BaseElem:
        data = bytes(data)
        if len(data) != BASE_LEN:
            raise LengthError(cls._kind, BASE_LEN, len(data))
        try:
            point = decompress_G1(int.from_bytes(data, "big"))
        except (ValueError, AssertionError) as exc:
            raise DecodeError(f"{cls._kind}: {exc}") from exc
        elem = cls(point)
        if elem.to_bytes() != data:
            raise DecodeError(f"{cls._kind}: non-canonical encoding")
        if not _in_subgroup(point):
            raise DecodeError(f"{cls._kind}: point outside the prime-order subgroup")
        return elem


@dataclass(frozen=True, eq=False)
class IdElem(_CurveElem):
    """Second source slot: H1/H2 outputs and their powers (96-byte compressed G2)."""

    _kind: ClassVar[str] = "IdElem"
    _exp_counter: ClassVar[str] = "id_exps"
    _identity_point: ClassVar[Any] = Z2
    encoded_len: ClassVar[int] = ID_LEN

    def to_bytes(self) -> bytes:
        z1, z2 = compress_G2(self.point)
        return z1.to_bytes(FQ_LEN, "big") + z2.to_bytes(FQ_LEN, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> IdElem:
        data = bytes(data)
        if len(data) != ID_LEN:
            raise LengthError(cls._kind, ID_LEN, len(data))
        try:
            point = decompress_G2((int.from_bytes(data[:FQ_LEN], "big"), int.from_bytes(data[FQ_LEN:], "big")))
        except (ValueError, AssertionError) as exc:
            raise DecodeError(f"{cls._kind}: {exc}") from exc
        elem = cls(point)
        if elem.to_bytes() != data:
            raise DecodeError(f"{cls._kind}: non-canonical encoding")
        if not _in_subgroup(point):
            raise DecodeError(f"{cls._kind}: point outside the prime-order subgroup")
        return elem


@dataclass(frozen=True, eq=False)
class TargetElem:
    """Element of GT, the order-q subgroup of Fq12 (576 bytes)."""

    value: Any

    encoded_len: ClassVar[int] = TARGET_LEN

    @classmethod
    def identity(cls) -> TargetElem:
        return cls(FQ12.one())

    def is_identity(self) -> bool:
        return self.value == FQ12.one()

    def __mul__(self, other: TargetElem) -> TargetElem:
        if not isinstance(other, TargetElem):
            return NotImplemented
        tick("target_muls")
        return TargetElem(self.value * other.value)

    def __pow__(self, k: int) -> TargetElem:
        tick("target_exps")
        return TargetElem(self.value ** (k % CURVE_ORDER))

    def inverse(self) -> TargetElem:
        return TargetElem(self.value.inv())

    def __truediv__(self, other: TargetElem) -> TargetElem:
        if not isinstance(other, TargetElem):
            return NotImplemented
        return self * other.inverse()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TargetElem):
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(("TargetElem", self.to_bytes()))

    def __repr__(self) -> str:
        return f"TargetElem({self.to_bytes().hex()[:16]}…)"

    def to_bytes(self) -> bytes:
        return b"".join((int(c) % FIELD_MODULUS).to_bytes(FQ_LEN, "big") for c in self.value.coeffs)

    @classmethod
    def from_bytes(cls, data: bytes) -> TargetElem:
        data = bytes(data)
        if len(data) != TARGET_LEN:
            raise LengthError("TargetElem", TARGET_LEN, len(data))
        coeffs = [int.from_bytes(data[i:i + FQ_LEN], "big") for i in range(0, TARGET_LEN, FQ_LEN)]
        if any(c >= FIELD_MODULUS for c in coeffs):
            raise DecodeError("TargetElem: coefficient not reduced modulo p")
        value = FQ12(coeffs)
        if value ** CURVE_ORDER != FQ12.one():
            raise DecodeError("TargetElem: value outside the order-q subgroup")
        return cls(value)


Element = BaseElem | IdElem | TargetElem


# ---------------------------------------------------------------------------
# Context
# ---------------------------------------------------------------------------


def _raw_pair(a: BaseElem, b: IdElem) -> TargetElem:
    return TargetElem(_ate_pairing(b.point, a.point))


@dataclass(frozen=True)
class PairingCtx:
    """Curve descriptor: generators, group order and element encoding lengths."""

    curve: str
    order: int
    g: BaseElem
    h: IdElem
    base_len: int = BASE_LEN
    id_len: int = ID_LEN
    target_len: int = TARGET_LEN
    scalar_len: int = SCALAR_LEN
    h1_tag: bytes = H1_TAG
    h2_tag: bytes = H2_TAG

    @cached_property
    def gt(self) -> TargetElem:
        """e(g, h): generator of the target group, computed once per context."""
        value = _raw_pair(self.g, self.h)
        if value.is_identity():
            raise RuntimeError("degenerate pairing: e(g, h) is the identity")
        return value

    def random_target(self, rng: Rng) -> TargetElem:
        """Uniform element of the pairing image subgroup."""
        return self.gt ** random_scalar(rng)


@lru_cache(maxsize=None)
def get_context(curve: str = CURVE_NAME) -> PairingCtx:
    """Return the (process-wide, immutable) context for a supported curve."""
    if curve != CURVE_NAME:
        raise ValueError(f"unsupported curve '{curve}' (supported: {CURVE_NAME})")
    logger.debug(f"Initialising pairing context for {curve}")
    return PairingCtx(curve=curve, order=CURVE_ORDER, g=BaseElem(G1), h=IdElem(G2))


# ---------------------------------------------------------------------------
# Pairing and hashes
# ---------------------------------------------------------------------------


def pair(a: BaseElem, b: IdElem) -> TargetElem:
    """e(a, b) with a in the base slot and b in the identity slot."""
    if not isinstance(a, BaseElem) or not isinstance(b, IdElem):
        raise TypeError("pair() takes (BaseElem, IdElem)")
    tick("pairings")
    return _raw_pair(a, b)


_HASH_CACHE: ContextVar[HashCache | None] = ContextVar("phrbridge_hash_cache", default=None)


@contextmanager
def using_hash_cache(cache: HashCache) -> Iterator[HashCache]:
    """Memoize hash-to-curve outputs in ``cache`` for the duration of the block."""
    token = _HASH_CACHE.set(cache)
    try:
        yield cache
    finally:
        _HASH_CACHE.reset(token)


def _affine(point: Any) -> tuple[int, int, int, int]:
    x, y = normalize(point)
    return (int(x.coeffs[0]), int(x.coeffs[1]), int(y.coeffs[0]), int(y.coeffs[1]))


def _from_affine(coords: tuple[int, int, int, int]) -> Any | None:
    x0, x1, y0, y1 = coords
    point = (FQ2([x0, x1]), FQ2([y0, y1]), FQ2.one())
    return point if is_on_curve(point, b2) else None


def _hash_to_id_point(data: bytes, tag: bytes) -> Any:
    cache = _HASH_CACHE.get()
    if cache is not None:
        hit = cache.get(tag, data)
        if hit is not None:
            point = _from_affine(hit)
            if point is not None:
                return point
            logger.warning("Discarding corrupt hash-to-curve cache entry")
    point = hash_to_G2(data, tag, hashlib.sha256)
    if cache is not None:
        cache.set(tag, data, _affine(point))
    return point


def hash_to_id_group(id_bytes: bytes) -> IdElem:
    """H1: identity bytes to the identity slot (hash-to-curve, tag ``HPRE-H1``)."""
    tick("hashes_h1")
    return IdElem(_hash_to_id_point(bytes(id_bytes), H1_TAG))


def hash_target_to_id_group(x: TargetElem) -> IdElem:
    """H2: target element to the identity slot via its canonical encoding (tag ``HPRE-H2``)."""
    tick("hashes_h2")
    return IdElem(_hash_to_id_point(x.to_bytes(), H2_TAG))


# ---------------------------------------------------------------------------
# Generic serialization
# ---------------------------------------------------------------------------


def serialize(e: Element | Scalar) -> bytes:
    if isinstance(e, (BaseElem, IdElem, TargetElem)):
        return e.to_bytes()
    if isinstance(e, int):
        return scalar_to_bytes(e)
    raise TypeError(f"cannot serialize {type(e).__name__}")


def deserialize(data: bytes, kind: type[BaseElem] | type[IdElem] | type[TargetElem] | type[int]) -> Element | Scalar:
    if kind is int:
        return scalar_from_bytes(data)
    if kind in (BaseElem, IdElem, TargetElem):
        return kind.from_bytes(data)  # type: ignore[union-attr]
    raise TypeError(f"cannot deserialize into {kind!r}")


def encoded_length(kind: type[BaseElem] | type[IdElem] | type[TargetElem] | type[int]) -> int:
    if kind is int:
        return SCALAR_LEN
    return kind.encoded_len  # type: ignore[union-attr]
