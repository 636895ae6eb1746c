"""KEM-DEM wrapper so byte payloads (PHRs) ride on the group-element scheme.

KEM: a random target element K is encrypted with the scheme.
DEM: AES-256-GCM under HKDF-SHA256(serialize(K), info="HPRE-KDF").  The
associated data is c1, which re-encryption carries over unchanged as C1, so
the DEM stays bound to its encapsulation across both levels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..errors import AuthFailure, KeyMismatch
from .hpre import (
    FirstLevelCiphertext,
    IbeSystemParams,
    ReEncryptionKey,
    SecondLevelCiphertext,
    decrypt_first,
    decrypt_second,
    encrypt,
    reencrypt,
)
from .pairing import BaseElem, IdElem, Rng, TargetElem

logger = logging.getLogger(__name__)

KDF_INFO = b"HPRE-KDF"
DEM_KEY_LEN = 32
DEM_NONCE_LEN = 12
DEM_TAG_LEN = 16


@dataclass(frozen=True)
class HybridCiphertext:
    kem: FirstLevelCiphertext | SecondLevelCiphertext
    dem: bytes
    dem_nonce: bytes

    @property
    def level(self) -> int:
        return 1 if isinstance(self.kem, FirstLevelCiphertext) else 2

    @property
    def binding(self) -> BaseElem:
        return self.kem.c1 if isinstance(self.kem, FirstLevelCiphertext) else self.kem.C1


def derive_dem_key(k: TargetElem) -> bytes:
    hkdf = HKDF(algorithm=hashes.SHA256(), length=DEM_KEY_LEN, salt=None, info=KDF_INFO)
    return hkdf.derive(k.to_bytes())


def _open(k: TargetElem, hc: HybridCiphertext) -> bytes:
    try:
        return AESGCM(derive_dem_key(k)).decrypt(hc.dem_nonce, hc.dem, hc.binding.to_bytes())
    except InvalidTag as exc:
        raise AuthFailure("DEM authentication failed (tampered envelope or wrong key)") from exc


def hybrid_encrypt(par1: IbeSystemParams, pk_do: IdElem, payload: bytes, rng: Rng) -> HybridCiphertext:
    k = par1.ctx.random_target(rng)
    kem = encrypt(par1, pk_do, k, rng)
    nonce = rng.token_bytes(DEM_NONCE_LEN)
    dem = AESGCM(derive_dem_key(k)).encrypt(nonce, bytes(payload), kem.c1.to_bytes())
    logger.debug(f"Hybrid-encrypted {len(payload)} byte payload")
    return HybridCiphertext(kem=kem, dem=dem, dem_nonce=nonce)


def hybrid_reencrypt(hc: HybridCiphertext, rk: ReEncryptionKey) -> HybridCiphertext:
    """Re-encrypt the KEM only; DEM bytes pass through untouched."""
    if not isinstance(hc.kem, FirstLevelCiphertext):
        raise TypeError("only first-level envelopes can be re-encrypted")
    return HybridCiphertext(kem=reencrypt(hc.kem, rk), dem=hc.dem, dem_nonce=hc.dem_nonce)


def hybrid_decrypt_first(sk_do: IdElem, hc: HybridCiphertext) -> bytes:
    if not isinstance(hc.kem, FirstLevelCiphertext):
        raise KeyMismatch("owner key cannot open a second-level envelope")
    return _open(decrypt_first(sk_do, hc.kem), hc)


def hybrid_decrypt_second(sk_du: IdElem, hc: HybridCiphertext) -> bytes:
    if not isinstance(hc.kem, SecondLevelCiphertext):
        raise KeyMismatch("user key cannot open a first-level envelope")
    return _open(decrypt_second(sk_du, hc.kem), hc)
