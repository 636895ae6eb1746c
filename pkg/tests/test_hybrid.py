"""Tests for the KEM-DEM envelope around the re-encryption scheme."""

from __future__ import annotations

from dataclasses import replace

import pytest

from phrbridge.crypto.hpre import rekeygen
from phrbridge.crypto.hybrid import (
    DEM_NONCE_LEN,
    DEM_TAG_LEN,
    derive_dem_key,
    hybrid_decrypt_first,
    hybrid_decrypt_second,
    hybrid_encrypt,
    hybrid_reencrypt,
)
from phrbridge.errors import AuthFailure, KeyMismatch

PHR = b'{"patient": "P-0042", "allergies": ["penicillin"], "bp": "120/80"}'


@pytest.fixture(scope="module")
def envelope(par1, owner):
    from phrbridge.crypto.pairing import SeededRng

    return hybrid_encrypt(par1, owner.pk, PHR, SeededRng(99))


@pytest.fixture(scope="module")
def shared(envelope, owner, user):
    from phrbridge.crypto.pairing import SeededRng

    rk = rekeygen(owner.sk, user.public, SeededRng(98))
    return hybrid_reencrypt(envelope, rk)


class TestRoundTrip:
    def test_owner_opens_own_envelope(self, envelope, owner):
        assert envelope.level == 1
        assert hybrid_decrypt_first(owner.sk, envelope) == PHR

    def test_user_opens_shared_envelope(self, shared, user):
        assert shared.level == 2
        assert hybrid_decrypt_second(user.sk, shared) == PHR

    def test_empty_payload(self, par1, owner, rng):
        hc = hybrid_encrypt(par1, owner.pk, b"", rng)
        assert len(hc.dem) == DEM_TAG_LEN
        assert hybrid_decrypt_first(owner.sk, hc) == b""

    def test_large_payload(self, par1, owner, user, rng):
        payload = bytes(range(256)) * 4096
        hc = hybrid_reencrypt(hybrid_encrypt(par1, owner.pk, payload, rng), rekeygen(owner.sk, user.public, rng))
        assert hybrid_decrypt_second(user.sk, hc) == payload

    def test_envelope_shape(self, envelope):
        assert len(envelope.dem_nonce) == DEM_NONCE_LEN
        assert len(envelope.dem) == len(PHR) + DEM_TAG_LEN


class TestReEncryptionLeavesDemAlone:
    def test_dem_bytes_unchanged(self, envelope, shared):
        assert shared.dem == envelope.dem
        assert shared.dem_nonce == envelope.dem_nonce
        assert shared.binding == envelope.binding

    def test_second_level_cannot_be_reencrypted(self, shared, owner, user, rng):
        with pytest.raises(TypeError):
            hybrid_reencrypt(shared, rekeygen(owner.sk, user.public, rng))


class TestFailures:
    def test_tampered_dem(self, shared, user):
        dem = bytearray(shared.dem)
        dem[0] ^= 0x01
        with pytest.raises(AuthFailure):
            hybrid_decrypt_second(user.sk, replace(shared, dem=bytes(dem)))

    def test_tampered_nonce(self, envelope, owner):
        with pytest.raises(AuthFailure):
            hybrid_decrypt_first(owner.sk, replace(envelope, dem_nonce=b"\x00" * DEM_NONCE_LEN))

    def test_wrong_user(self, shared, other_user):
        with pytest.raises(AuthFailure):
            hybrid_decrypt_second(other_user.sk, shared)

    def test_level_mismatch(self, envelope, shared, owner, user):
        with pytest.raises(KeyMismatch):
            hybrid_decrypt_second(user.sk, envelope)
        with pytest.raises(KeyMismatch):
            hybrid_decrypt_first(owner.sk, shared)

    def test_swapped_dem_fails(self, par1, owner, envelope, rng):
        other = hybrid_encrypt(par1, owner.pk, PHR, rng)
        with pytest.raises(AuthFailure):
            hybrid_decrypt_first(owner.sk, replace(other, dem=envelope.dem, dem_nonce=envelope.dem_nonce))


class TestKeyDerivation:
    def test_deterministic_and_sized(self, ctx):
        assert derive_dem_key(ctx.gt) == derive_dem_key(ctx.gt)
        assert len(derive_dem_key(ctx.gt)) == 32
        assert derive_dem_key(ctx.gt) != derive_dem_key(ctx.gt ** 2)


@pytest.mark.slow
class TestTamperTrials:
    def test_hundred_tampered_envelopes(self, shared, user):
        from phrbridge.crypto.pairing import SeededRng

        rng = SeededRng(404)
        for _ in range(100):
            dem = bytearray(shared.dem)
            dem[rng.randbelow(len(dem))] ^= 1 + rng.randbelow(255)
            with pytest.raises(AuthFailure):
                hybrid_decrypt_second(user.sk, replace(shared, dem=bytes(dem)))
