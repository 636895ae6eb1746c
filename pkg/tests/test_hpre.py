"""Tests for the IBE -> CLC proxy re-encryption scheme."""

from __future__ import annotations

import pytest

from phrbridge.crypto.counting import count_operations
from phrbridge.crypto.hooks import capture_rekey_secrets
from phrbridge.crypto.hpre import (
    ClcMasterKey,
    ClcPartialKey,
    FirstLevelCiphertext,
    IbeMasterKey,
    clc_partial_keygen,
    clc_user_keygen,
    decrypt_first,
    decrypt_second,
    encrypt,
    ibe_keygen,
    reencrypt,
    rekeygen,
    setup_clc,
    setup_ibe,
    verify_keypair,
    verify_partial_key,
)
from phrbridge.crypto.pairing import (
    BaseElem,
    SeededRng,
    TargetElem,
    hash_target_to_id_group,
    hash_to_id_group,
    pair,
)
from phrbridge.errors import PartialKeyInvalid


class TestKeyGeneration:
    def test_ibe_key_pair_is_consistent(self, par1, owner):
        assert owner.pk == hash_to_id_group(b"alice@hospital-a")
        assert verify_keypair(par1, owner)

    def test_ibe_key_is_deterministic(self, domains, owner):
        assert ibe_keygen(domains[1], b"alice@hospital-a") == owner

    def test_clc_key_pair_is_consistent(self, par2, user):
        assert user.pk1 == hash_to_id_group(b"bob@hospital-b")
        assert verify_keypair(par2, user)

    def test_tampered_key_pair_fails(self, par1, owner, ctx):
        forged = type(owner)(id=owner.id, pk=owner.pk, sk=owner.sk * ctx.h)
        assert not verify_keypair(par1, forged)

    def test_partial_key_checks(self, domains, par2):
        partial = clc_partial_keygen(domains[3], b"bob@hospital-b")
        assert verify_partial_key(par2, partial)
        bad = ClcPartialKey(id=partial.id, d=partial.d * partial.d)
        assert not verify_partial_key(par2, bad)

    def test_user_keygen_rejects_bad_partial(self, domains, par2, rng):
        partial = clc_partial_keygen(domains[3], b"mallory")
        forged = ClcPartialKey(id=b"bob@hospital-b", d=partial.d)
        with pytest.raises(PartialKeyInvalid):
            clc_user_keygen(forged, par2, rng)

    def test_user_secret_is_fresh_per_enrolment(self, domains, par2):
        partial = clc_partial_keygen(domains[3], b"bob@hospital-b")
        a = clc_user_keygen(partial, par2, SeededRng(1))
        b = clc_user_keygen(partial, par2, SeededRng(2))
        assert a.pk1 == b.pk1
        assert a.pk2 != b.pk2

    def test_master_keys_hide_secrets(self):
        assert "123" not in repr(IbeMasterKey(123))
        with pytest.raises(ValueError):
            ClcMasterKey(0)

    def test_setup_is_reproducible_from_seed(self, ctx):
        par1_a, msk1_a = setup_ibe(ctx, SeededRng(5))
        par1_b, msk1_b = setup_ibe(ctx, SeededRng(5))
        assert (msk1_a.s, par1_a.h1) == (msk1_b.s, par1_b.h1)
        par2_a, msk2_a = setup_clc(ctx, SeededRng(6))
        par2_b, msk2_b = setup_clc(ctx, SeededRng(6))
        assert (msk2_a.y, par2_a.h2) == (msk2_b.y, par2_b.h2)
        assert msk1_a.s != setup_ibe(ctx, SeededRng(8))[1].s

    def test_system_keys(self, ctx, domains):
        par1, msk1, par2, msk2 = domains
        assert par1.h1 == ctx.g ** msk1.s
        assert par2.h2 == ctx.g ** msk2.y


class TestFirstLevel:
    def test_roundtrip(self, ctx, par1, owner, rng, trials):
        for _ in range(trials):
            m = ctx.random_target(rng)
            assert decrypt_first(owner.sk, encrypt(par1, owner.pk, m, rng)) == m

    def test_encryption_is_randomized(self, ctx, par1, owner, rng):
        m = ctx.random_target(rng)
        a = encrypt(par1, owner.pk, m, rng)
        b = encrypt(par1, owner.pk, m, rng)
        assert a.c1 != b.c1
        assert a.c2 != b.c2

    def test_target_identity_message(self, par1, owner, user, rng):
        one = TargetElem.identity()
        c = encrypt(par1, owner.pk, one, rng)
        assert decrypt_first(owner.sk, c) == one
        rk = rekeygen(owner.sk, user.public, rng)
        assert decrypt_second(user.sk, reencrypt(c, rk)) == one

    def test_scaling_c2_scales_the_message(self, ctx, par1, owner, rng):
        m = ctx.random_target(rng)
        f = ctx.random_target(rng)
        c = encrypt(par1, owner.pk, m, rng)
        mauled = FirstLevelCiphertext(c1=c.c1, c2=c.c2 * f)
        assert decrypt_first(owner.sk, mauled) == m * f

    def test_wrong_owner_does_not_decrypt(self, ctx, domains, par1, owner, rng):
        m = ctx.random_target(rng)
        c = encrypt(par1, owner.pk, m, rng)
        eve = ibe_keygen(domains[1], b"eve@hospital-a")
        assert decrypt_first(eve.sk, c) != m

    def test_identity_c1_rejected(self, ctx):
        with pytest.raises(ValueError):
            FirstLevelCiphertext(c1=BaseElem.identity(), c2=ctx.gt)


class TestReEncryption:
    def test_roundtrip(self, ctx, par1, owner, user, rng, trials):
        for _ in range(trials):
            m = ctx.random_target(rng)
            c = encrypt(par1, owner.pk, m, rng)
            rk = rekeygen(owner.sk, user.public, rng)
            assert decrypt_second(user.sk, reencrypt(c, rk)) == m

    def test_proxy_copies_components(self, ctx, par1, owner, user, rng):
        c = encrypt(par1, owner.pk, ctx.random_target(rng), rng)
        rk = rekeygen(owner.sk, user.public, rng)
        c2 = reencrypt(c, rk)
        assert c2.C1 == c.c1
        assert c2.C3 == rk.rk2
        assert c2.C4 == rk.rk3

    def test_x_recovery(self, par1, owner, user, rng):
        with capture_rekey_secrets() as captured:
            rk = rekeygen(owner.sk, user.public, rng)
        (x,) = captured
        assert rk.rk3 * pair(rk.rk2, user.sk).inverse() == x

    def test_rekeys_are_randomized(self, owner, user, rng):
        a = rekeygen(owner.sk, user.public, rng)
        b = rekeygen(owner.sk, user.public, rng)
        assert a.rk1 != b.rk1
        assert a.rk2 != b.rk2
        assert a.rk3 != b.rk3

    def test_rk1_unmasks_to_hashed_secret(self, owner, user, rng):
        with capture_rekey_secrets() as captured:
            rk = rekeygen(owner.sk, user.public, rng)
        (x,) = captured
        assert rk.rk1 * owner.sk == hash_target_to_id_group(x)

    def test_accepts_public_key_tuple(self, ctx, par1, owner, user, rng):
        m = ctx.random_target(rng)
        rk = rekeygen(owner.sk, (user.pk1, user.pk2), rng)
        assert decrypt_second(user.sk, reencrypt(encrypt(par1, owner.pk, m, rng), rk)) == m

    def test_other_user_cannot_decrypt(self, ctx, par1, owner, user, other_user, rng, trials):
        for _ in range(trials):
            m = ctx.random_target(rng)
            c2 = reencrypt(encrypt(par1, owner.pk, m, rng), rekeygen(owner.sk, user.public, rng))
            assert decrypt_second(other_user.sk, c2) != m

    def test_second_level_cannot_be_reencrypted(self, ctx, par1, owner, user, rng):
        rk = rekeygen(owner.sk, user.public, rng)
        c2 = reencrypt(encrypt(par1, owner.pk, ctx.random_target(rng), rng), rk)
        with pytest.raises(TypeError):
            reencrypt(c2, rk)  # type: ignore[arg-type]

    @pytest.mark.slow
    def test_wrong_user_never_recovers(self, ctx, par1, owner, user, other_user):
        rng = SeededRng(77)
        rk = rekeygen(owner.sk, user.public, rng)
        hits = 0
        for _ in range(100):
            m = ctx.random_target(rng)
            hits += decrypt_second(other_user.sk, reencrypt(encrypt(par1, owner.pk, m, rng), rk)) == m
        assert hits == 0

    @pytest.mark.slow
    def test_thousand_messages(self, ctx, par1, owner, user):
        rng = SeededRng(1000)
        rk = rekeygen(owner.sk, user.public, rng)
        for _ in range(1000):
            m = ctx.random_target(rng)
            c = encrypt(par1, owner.pk, m, rng)
            assert decrypt_first(owner.sk, c) == m
            assert decrypt_second(user.sk, reencrypt(c, rk)) == m


class TestOperationCounts:
    def test_reencrypt_uses_one_pairing(self, ctx, par1, owner, user, rng):
        c = encrypt(par1, owner.pk, ctx.random_target(rng), rng)
        rk = rekeygen(owner.sk, user.public, rng)
        with count_operations() as tally:
            reencrypt(c, rk)
        assert tally.snapshot().pairings == 1

    def test_decrypt_second_uses_two_pairings(self, ctx, par1, owner, user, rng):
        c2 = reencrypt(encrypt(par1, owner.pk, ctx.random_target(rng), rng), rekeygen(owner.sk, user.public, rng))
        with count_operations() as tally:
            decrypt_second(user.sk, c2)
        counts = tally.snapshot()
        assert counts.pairings == 2
        assert counts.hashes_h2 == 1


class TestHooks:
    def test_capture_requires_flag(self, monkeypatch):
        monkeypatch.setenv("PHRBRIDGE_TEST_HOOKS", "0")
        with pytest.raises(RuntimeError, match="disabled"):
            with capture_rekey_secrets():
                pass
