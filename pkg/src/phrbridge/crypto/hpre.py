"""Heterogeneous proxy re-encryption from an IBE domain to a CLC domain.

Hospital A runs an IBE key generation centre (master key s, h1 = g^s);
Hospital B runs a certificateless one (master key y, h2 = g^y).  A data
owner's first-level ciphertext is turned by an untrusted proxy into a
second-level ciphertext that only the chosen CLC data user can open.

Operations are pure functions of their arguments plus an explicit RNG handle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..errors import PartialKeyInvalid
from .hooks import record_rekey_secret
from .pairing import (
    BaseElem,
    IdElem,
    PairingCtx,
    Rng,
    Scalar,
    TargetElem,
    get_context,
    hash_target_to_id_group,
    hash_to_id_group,
    pair,
    random_scalar,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# System parameters and master keys
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IbeSystemParams:
    """par1: public parameters of the IBE chain."""
    ctx: PairingCtx
    h1: BaseElem

    def __post_init__(self) -> None:
        if self.h1.is_identity():
            raise ValueError("h1 must not be the identity")


@dataclass(frozen=True, repr=False)
class IbeMasterKey:
    s: Scalar

    def __post_init__(self) -> None:
        if not 0 < self.s < get_context().order:
            raise ValueError("master key must be a nonzero scalar")

    def __repr__(self) -> str:
        return "IbeMasterKey(<secret>)"


@dataclass(frozen=True)
class ClcSystemParams:
    """par2: public parameters of the CLC chain."""
    ctx: PairingCtx
    h2: BaseElem

    def __post_init__(self) -> None:
        if self.h2.is_identity():
            raise ValueError("h2 must not be the identity")


@dataclass(frozen=True, repr=False)
class ClcMasterKey:
    y: Scalar

    def __post_init__(self) -> None:
        if not 0 < self.y < get_context().order:
            raise ValueError("master key must be a nonzero scalar")

    def __repr__(self) -> str:
        return "ClcMasterKey(<secret>)"


# ---------------------------------------------------------------------------
# User keys
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IbePublicKey:
    id: bytes
    pk: IdElem


@dataclass(frozen=True)
class IbeKeyPair:
    """Data-owner key pair: pk = H1(id), sk = pk^s."""
    id: bytes
    pk: IdElem
    sk: IdElem = field(repr=False)

    @property
    def public(self) -> IbePublicKey:
        return IbePublicKey(id=self.id, pk=self.pk)


@dataclass(frozen=True)
class ClcPartialKey:
    """KGC-issued partial private key d = H1(id)^y."""
    id: bytes
    d: IdElem = field(repr=False)


@dataclass(frozen=True)
class ClcPublicKey:
    """pk_DU = (pk1, pk2) = (H1(id), h2^r)."""
    pk1: IdElem
    pk2: BaseElem


@dataclass(frozen=True)
class ClcKeyPair:
    """Data-user key pair; the user secret r is not retained."""
    id: bytes
    pk1: IdElem
    pk2: BaseElem
    sk: IdElem = field(repr=False)

    @property
    def public(self) -> ClcPublicKey:
        return ClcPublicKey(pk1=self.pk1, pk2=self.pk2)


# ---------------------------------------------------------------------------
# Ciphertexts and re-encryption keys
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FirstLevelCiphertext:
    """C_DO = (c1, c2) = (g^a, M * e(h1, pk_DO)^a)."""
    c1: BaseElem
    c2: TargetElem

    def __post_init__(self) -> None:
        if self.c1.is_identity():
            raise ValueError("c1 must not be the identity")


@dataclass(frozen=True)
class ReEncryptionKey:
    """rk_DO = (H2(X)/sk_DO, g^lambda, X * e(pk2, pk1)^lambda)."""
    rk1: IdElem
    rk2: BaseElem
    rk3: TargetElem

    def __post_init__(self) -> None:
        if self.rk2.is_identity():
            raise ValueError("rk2 must not be the identity")


@dataclass(frozen=True)
class SecondLevelCiphertext:
    """C_DU = (C1, C2, C3, C4); not accepted by reencrypt, so multi-hop is impossible."""
    C1: BaseElem
    C2: TargetElem
    C3: BaseElem
    C4: TargetElem


# ---------------------------------------------------------------------------
# Setup and key generation
# ---------------------------------------------------------------------------


def setup_ibe(ctx: PairingCtx, rng: Rng) -> tuple[IbeSystemParams, IbeMasterKey]:
    """Hospital A: master key s and system public key h1 = g^s."""
    s = random_scalar(rng)
    params = IbeSystemParams(ctx=ctx, h1=ctx.g ** s)
    logger.info(f"IBE domain set up on {ctx.curve}")
    return params, IbeMasterKey(s)


def setup_clc(ctx: PairingCtx, rng: Rng) -> tuple[ClcSystemParams, ClcMasterKey]:
    """Hospital B: master key y and system public key h2 = g^y."""
    y = random_scalar(rng)
    params = ClcSystemParams(ctx=ctx, h2=ctx.g ** y)
    logger.info(f"CLC domain set up on {ctx.curve}")
    return params, ClcMasterKey(y)


def ibe_keygen(msk: IbeMasterKey, id: bytes) -> IbeKeyPair:
    pk = hash_to_id_group(id)
    return IbeKeyPair(id=bytes(id), pk=pk, sk=pk ** msk.s)


def clc_partial_keygen(msk: ClcMasterKey, id: bytes) -> ClcPartialKey:
    return ClcPartialKey(id=bytes(id), d=hash_to_id_group(id) ** msk.y)


def verify_partial_key(par2: ClcSystemParams, partial: ClcPartialKey) -> bool:
    """e(h2, H1(id)) == e(g, d)."""
    return pair(par2.h2, hash_to_id_group(partial.id)) == pair(par2.ctx.g, partial.d)


def clc_user_keygen(partial: ClcPartialKey, par2: ClcSystemParams, rng: Rng) -> ClcKeyPair:
    """Data user: check the KGC response, then pick r and derive (sk, pk)."""
    pk1 = hash_to_id_group(partial.id)
    if pair(par2.h2, pk1) != pair(par2.ctx.g, partial.d):
        raise PartialKeyInvalid(f"partial key for {partial.id!r} fails the KGC consistency check")
    r = random_scalar(rng)
    keypair = ClcKeyPair(id=partial.id, pk1=pk1, pk2=par2.h2 ** r, sk=partial.d ** r)
    del r
    return keypair


def verify_keypair(params: IbeSystemParams | ClcSystemParams, keypair: IbeKeyPair | ClcKeyPair) -> bool:
    """Check a key pair's defining pairing equation.

    IBE: pk = H1(id) and e(h1, pk) = e(g, sk).
    CLC: pk1 = H1(id) and e(pk2, pk1) = e(g, sk).
    """
    g = params.ctx.g
    if isinstance(keypair, IbeKeyPair):
        if not isinstance(params, IbeSystemParams):
            raise TypeError("IBE key pairs are checked against IbeSystemParams")
        if keypair.pk != hash_to_id_group(keypair.id):
            return False
        return pair(params.h1, keypair.pk) == pair(g, keypair.sk)
    if isinstance(keypair, ClcKeyPair):
        if keypair.pk1 != hash_to_id_group(keypair.id) or keypair.pk2.is_identity():
            return False
        return pair(keypair.pk2, keypair.pk1) == pair(g, keypair.sk)
    raise TypeError(f"not a key pair: {type(keypair).__name__}")


# ---------------------------------------------------------------------------
# Encryption, re-encryption, decryption
# ---------------------------------------------------------------------------


def encrypt(par1: IbeSystemParams, pk_do: IdElem, m: TargetElem, rng: Rng) -> FirstLevelCiphertext:
    alpha = random_scalar(rng)
    c1 = par1.ctx.g ** alpha
    c2 = m * (pair(par1.h1, pk_do) ** alpha)
    return FirstLevelCiphertext(c1=c1, c2=c2)


def decrypt_first(sk_do: IdElem, c: FirstLevelCiphertext) -> TargetElem:
    """Owner-side decryption: c2 / e(c1, sk_DO)."""
    return c.c2 * pair(c.c1, sk_do).inverse()


def rekeygen(
    sk_do: IdElem,
    pk_du: ClcPublicKey | tuple[IdElem, BaseElem],
    rng: Rng,
    ctx: PairingCtx | None = None,
) -> ReEncryptionKey:
    """Re-encryption key from the owner's IBE secret to a CLC user's public key."""
    ctx = ctx or get_context()
    pk1, pk2 = (pk_du.pk1, pk_du.pk2) if isinstance(pk_du, ClcPublicKey) else pk_du
    x = ctx.random_target(rng)
    lam = random_scalar(rng)
    record_rekey_secret(x)
    rk1 = hash_target_to_id_group(x) * sk_do.inverse()
    rk2 = ctx.g ** lam
    rk3 = x * (pair(pk2, pk1) ** lam)
    return ReEncryptionKey(rk1=rk1, rk2=rk2, rk3=rk3)


def reencrypt(c: FirstLevelCiphertext, rk: ReEncryptionKey) -> SecondLevelCiphertext:
    """Proxy transformation; reads neither system parameters nor secret keys."""
    if not isinstance(c, FirstLevelCiphertext):
        raise TypeError("only first-level ciphertexts can be re-encrypted")
    return SecondLevelCiphertext(
        C1=c.c1,
        C2=c.c2 * pair(c.c1, rk.rk1),
        C3=rk.rk2,
        C4=rk.rk3,
    )


def decrypt_second(sk_du: IdElem, c: SecondLevelCiphertext) -> TargetElem:
    """Data-user decryption: X = C4 / e(C3, sk_DU), then M = C2 / e(C1, H2(X))."""
    x = c.C4 * pair(c.C3, sk_du).inverse()
    return c.C2 * pair(c.C1, hash_target_to_id_group(x)).inverse()
