"""Tests for the pairing facade: algebra, hashing, encodings, RNG and op tally."""

from __future__ import annotations

import pytest

from phrbridge.cache import HashCache
from phrbridge.crypto.counting import count_operations
from phrbridge.crypto.pairing import (
    BASE_LEN,
    CURVE_ORDER,
    FIELD_MODULUS,
    H1_TAG,
    ID_LEN,
    SCALAR_LEN,
    TARGET_LEN,
    BaseElem,
    IdElem,
    SeededRng,
    TargetElem,
    deserialize,
    encoded_length,
    get_context,
    hash_target_to_id_group,
    hash_to_id_group,
    make_rng,
    pair,
    random_scalar,
    scalar_from_bytes,
    scalar_inverse,
    scalar_to_bytes,
    serialize,
    using_hash_cache,
)
from phrbridge.errors import DecodeError, LengthError


def _off_subgroup_g1_bytes() -> bytes:
    """Compressed encoding of a curve point outside the order-q subgroup."""
    x = 1
    while True:
        rhs = (x ** 3 + 4) % FIELD_MODULUS
        y = pow(rhs, (FIELD_MODULUS + 1) // 4, FIELD_MODULUS)
        if y * y % FIELD_MODULUS == rhs:
            break
        x += 1
    a_flag = 1 if (y * 2) // FIELD_MODULUS else 0
    z = x | (1 << 383) | (a_flag << 381)
    return z.to_bytes(BASE_LEN, "big")


class TestContext:
    def test_lengths(self, ctx):
        assert ctx.curve == "bls12_381"
        assert ctx.order == CURVE_ORDER
        assert (ctx.base_len, ctx.id_len, ctx.target_len, ctx.scalar_len) == (48, 96, 576, 32)

    def test_generators_are_not_identity(self, ctx):
        assert not ctx.g.is_identity()
        assert not ctx.h.is_identity()
        assert not ctx.gt.is_identity()

    def test_context_is_cached(self):
        assert get_context() is get_context()

    def test_unsupported_curve(self):
        with pytest.raises(ValueError, match="unsupported curve"):
            get_context("bn254")


class TestBilinearity:
    def test_random_pairs(self, ctx, rng, trials):
        for _ in range(trials):
            a, b = random_scalar(rng), random_scalar(rng)
            assert pair(ctx.g ** a, ctx.h ** b) == pair(ctx.g, ctx.h) ** (a * b)

    @pytest.mark.slow
    def test_hundred_random_pairs(self, ctx):
        rng = SeededRng(100)
        for _ in range(100):
            a, b = random_scalar(rng), random_scalar(rng)
            assert pair(ctx.g ** a, ctx.h ** b) == ctx.gt ** (a * b)

    def test_non_degenerate(self, ctx):
        assert pair(ctx.g, ctx.h) != TargetElem.identity()

    def test_identity_argument_gives_identity(self, ctx):
        assert pair(BaseElem.identity(), ctx.h).is_identity()

    def test_argument_types_are_checked(self, ctx):
        with pytest.raises(TypeError):
            pair(ctx.h, ctx.g)


class TestGroupArithmetic:
    def test_inverse_and_division(self, ctx, rng):
        k = random_scalar(rng)
        p = ctx.g ** k
        assert (p * p.inverse()).is_identity()
        assert p / p == BaseElem.identity()
        q = ctx.h ** k
        assert (q * q.inverse()) == IdElem.identity()

    def test_exponent_laws(self, ctx, rng, trials):
        for _ in range(trials):
            a, b = random_scalar(rng), random_scalar(rng)
            for x in (ctx.g, ctx.h, ctx.gt):
                assert x ** (a + b) == (x ** a) * (x ** b)
                assert x ** (a * b) == (x ** a) ** b

    def test_exponent_reduced_mod_order(self, ctx):
        assert ctx.g ** (CURVE_ORDER + 5) == ctx.g ** 5
        assert ctx.gt ** CURVE_ORDER == TargetElem.identity()

    def test_mixed_types_do_not_combine(self, ctx):
        with pytest.raises(TypeError):
            ctx.g * ctx.h

    def test_scalar_inverse(self, rng):
        k = random_scalar(rng)
        assert k * scalar_inverse(k) % CURVE_ORDER == 1
        with pytest.raises(ZeroDivisionError):
            scalar_inverse(0)


class TestHashing:
    def test_deterministic(self):
        assert hash_to_id_group(b"alice") == hash_to_id_group(b"alice")
        assert hash_to_id_group(b"alice") != hash_to_id_group(b"bob")

    def test_output_in_subgroup(self):
        point = hash_to_id_group(b"alice")
        assert not point.is_identity()
        assert IdElem.from_bytes(point.to_bytes()) == point

    def test_empty_identity_hashes_to_valid_element(self):
        point = hash_to_id_group(b"")
        assert IdElem.from_bytes(point.to_bytes()) == point
        assert point != hash_to_id_group(b"\x00")

    def test_h2_of_target_identity(self):
        one = TargetElem.identity()
        point = hash_target_to_id_group(one)
        assert point == hash_target_to_id_group(one)
        assert IdElem.from_bytes(point.to_bytes()) == point

    def test_h1_and_h2_are_domain_separated(self, ctx):
        x = ctx.gt
        assert hash_target_to_id_group(x) != hash_to_id_group(x.to_bytes())


class TestEncoding:
    def test_lengths(self, ctx):
        assert len(ctx.g.to_bytes()) == BASE_LEN
        assert len(ctx.h.to_bytes()) == ID_LEN
        assert len(ctx.gt.to_bytes()) == TARGET_LEN
        assert encoded_length(int) == SCALAR_LEN
        assert encoded_length(TargetElem) == TARGET_LEN

    def test_lengths_of_random_elements(self, ctx, rng, trials):
        for _ in range(trials * 3):
            k = random_scalar(rng)
            assert len(serialize(ctx.g ** k)) == ctx.base_len
            assert len(serialize(ctx.h ** k)) == ctx.id_len
            assert len(serialize(ctx.random_target(rng))) == ctx.target_len
            assert len(serialize(k)) == ctx.scalar_len

    def test_roundtrip_each_kind(self, ctx, rng):
        k = random_scalar(rng)
        for elem in (ctx.g ** k, ctx.h ** k, ctx.gt ** k, BaseElem.identity(), IdElem.identity()):
            assert deserialize(serialize(elem), type(elem)) == elem
        assert deserialize(serialize(k), int) == k

    def test_wrong_length(self, ctx):
        with pytest.raises(LengthError):
            BaseElem.from_bytes(ctx.g.to_bytes()[:-1])
        with pytest.raises(LengthError):
            IdElem.from_bytes(ctx.h.to_bytes() + b"\x00")
        with pytest.raises(LengthError):
            TargetElem.from_bytes(b"\x00" * 10)

    def test_missing_compression_flag(self, ctx):
        data = bytearray(ctx.g.to_bytes())
        data[0] &= 0x7F
        with pytest.raises(DecodeError):
            BaseElem.from_bytes(bytes(data))

    def test_point_outside_subgroup(self):
        with pytest.raises(DecodeError):
            BaseElem.from_bytes(_off_subgroup_g1_bytes())

    def test_target_coefficient_not_reduced(self):
        data = FIELD_MODULUS.to_bytes(48, "big") + b"\x00" * (TARGET_LEN - 48)
        with pytest.raises(DecodeError, match="not reduced"):
            TargetElem.from_bytes(data)

    def test_target_outside_subgroup(self):
        data = (2).to_bytes(48, "big") + b"\x00" * (TARGET_LEN - 48)
        with pytest.raises(DecodeError, match="subgroup"):
            TargetElem.from_bytes(data)

    def test_scalar_range(self):
        with pytest.raises(DecodeError):
            scalar_from_bytes(CURVE_ORDER.to_bytes(32, "big"))
        with pytest.raises(ValueError):
            scalar_to_bytes(CURVE_ORDER)


class TestRandomness:
    def test_seeded_rng_is_reproducible(self):
        a, b = SeededRng(42), SeededRng(42)
        assert [random_scalar(a) for _ in range(3)] == [random_scalar(b) for _ in range(3)]
        assert a.token_bytes(16) == b.token_bytes(16)

    def test_scalars_are_nonzero(self, rng):
        assert all(0 < random_scalar(rng) < CURVE_ORDER for _ in range(50))

    def test_make_rng(self):
        assert isinstance(make_rng(1), SeededRng)
        assert not isinstance(make_rng(None), SeededRng)


class TestOperationTally:
    def test_counts_inside_block_only(self, ctx):
        pair(ctx.g, ctx.h)
        with count_operations() as tally:
            pair(ctx.g, ctx.h)
            ctx.g ** 3
            ctx.h ** 3
            hash_to_id_group(b"x")
        counts = tally.snapshot()
        assert counts.pairings == 1
        assert counts.base_exps == 1
        assert counts.id_exps == 1
        assert counts.hashes_h1 == 1
        assert counts.target_exps == 0

    def test_context_generator_is_not_tallied(self):
        with count_operations() as tally:
            get_context().gt
        assert tally.snapshot().pairings == 0


class TestHashCache:
    def test_memoizes_and_survives_reopen(self, tmp_path):
        expected = hash_to_id_group(b"dave")
        with HashCache(tmp_path / "cache") as cache:
            with using_hash_cache(cache):
                assert hash_to_id_group(b"dave") == expected
            assert cache.stats()["size"] == 1
        with HashCache(tmp_path / "cache") as cache:
            assert cache.get(H1_TAG, b"dave") is not None
            with using_hash_cache(cache):
                assert hash_to_id_group(b"dave") == expected

    def test_corrupt_entry_is_recomputed(self, tmp_path):
        expected = hash_to_id_group(b"erin")
        with HashCache(tmp_path / "cache") as cache:
            cache.set(H1_TAG, b"erin", (1, 2, 3, 4))
            with using_hash_cache(cache):
                assert hash_to_id_group(b"erin") == expected

    def test_clear(self, tmp_path):
        with HashCache(tmp_path / "cache") as cache:
            cache.set(H1_TAG, b"k", (0, 0, 0, 0))
            cache.clear()
            assert cache.stats()["size"] == 0
