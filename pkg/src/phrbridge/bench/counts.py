"""Static expensive-operation counts per scheme operation, with instrumented checks."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..crypto.counting import count_operations
from ..crypto.hpre import (
    ClcKeyPair,
    FirstLevelCiphertext,
    IbeKeyPair,
    IbeSystemParams,
    ReEncryptionKey,
    SecondLevelCiphertext,
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
)
from ..crypto.pairing import Rng, TargetElem, get_context, make_rng
from ..errors import BenchError
from ..models import OpCounters, OpKind, OpsReport, OpsRow

logger = logging.getLogger(__name__)

_ENCRYPT = OpCounters(pairings=1, base_exps=1, target_exps=1, target_muls=1)
_DECRYPT_FIRST = OpCounters(pairings=1, target_muls=1)
_REKEYGEN = OpCounters(pairings=1, base_exps=1, target_exps=2, hashes_h2=1, target_muls=1)
_REENCRYPT = OpCounters(pairings=1, target_muls=1)
_DECRYPT_SECOND = OpCounters(pairings=2, hashes_h2=1, target_muls=2)

# rekeygen's target_exps include sampling X as gt^k.
STATIC_COUNTS: dict[OpKind, OpCounters] = {
    OpKind.ENCRYPT: _ENCRYPT,
    OpKind.DECRYPT_FIRST: _DECRYPT_FIRST,
    OpKind.REKEYGEN: _REKEYGEN,
    OpKind.REENCRYPT: _REENCRYPT,
    OpKind.DECRYPT_SECOND: _DECRYPT_SECOND,
    OpKind.QUERY: _REKEYGEN + _REENCRYPT,
}


@dataclass(frozen=True)
class _Fixture:
    """Inputs for every operation, prepared outside any counting block."""
    par1: IbeSystemParams
    owner: IbeKeyPair
    user: ClcKeyPair
    m: TargetElem
    c: FirstLevelCiphertext
    rk: ReEncryptionKey
    c2: SecondLevelCiphertext

    @classmethod
    def build(cls, rng: Rng) -> _Fixture:
        ctx = get_context()
        par1, msk1 = setup_ibe(ctx, rng)
        par2, msk2 = setup_clc(ctx, rng)
        owner = ibe_keygen(msk1, b"bench-owner")
        user = clc_user_keygen(clc_partial_keygen(msk2, b"bench-user"), par2, rng)
        m = ctx.random_target(rng)
        c = encrypt(par1, owner.pk, m, rng)
        rk = rekeygen(owner.sk, user.public, rng, ctx)
        return cls(par1=par1, owner=owner, user=user, m=m, c=c, rk=rk, c2=reencrypt(c, rk))


def _run(op_kind: OpKind, fx: _Fixture, rng: Rng) -> OpCounters:
    with count_operations() as tally:
        if op_kind is OpKind.ENCRYPT:
            encrypt(fx.par1, fx.owner.pk, fx.m, rng)
        elif op_kind is OpKind.DECRYPT_FIRST:
            decrypt_first(fx.owner.sk, fx.c)
        elif op_kind is OpKind.REKEYGEN:
            rekeygen(fx.owner.sk, fx.user.public, rng)
        elif op_kind is OpKind.REENCRYPT:
            reencrypt(fx.c, fx.rk)
        elif op_kind is OpKind.DECRYPT_SECOND:
            decrypt_second(fx.user.sk, fx.c2)
        elif op_kind is OpKind.QUERY:
            reencrypt(fx.c, rekeygen(fx.owner.sk, fx.user.public, rng))
        else:
            raise ValueError(f"unknown operation {op_kind!r}")
        return tally.snapshot()


def instrumented_counts(op_kind: OpKind, rng: Rng | None = None) -> OpCounters:
    """Execute ``op_kind`` once and return the operations it actually performed."""
    rng = rng or make_rng()
    return _run(OpKind(op_kind), _Fixture.build(rng), rng)


def count_ops(op_kind: OpKind | str, verify: bool = False, rng: Rng | None = None) -> OpCounters:
    """Static count for ``op_kind``; with ``verify`` the operation is also run and compared."""
    op_kind = OpKind(op_kind)
    static = STATIC_COUNTS[op_kind]
    if verify:
        measured = instrumented_counts(op_kind, rng)
        if measured != static:
            raise BenchError(f"{op_kind.value}: static {static} != instrumented {measured}")
    return static


def ops_report(verify: bool = False, rng: Rng | None = None) -> OpsReport:
    """One row per operation kind; a shared fixture is built once when verifying."""
    rows: list[OpsRow] = []
    fx: _Fixture | None = None
    if verify:
        rng = rng or make_rng()
        fx = _Fixture.build(rng)
    for op_kind in OpKind:
        static = STATIC_COUNTS[op_kind]
        verified: bool | None = None
        if fx is not None and rng is not None:
            verified = _run(op_kind, fx, rng) == static
            if not verified:
                logger.error(f"{op_kind.value}: instrumented counts differ from the static table")
        rows.append(OpsRow(op_kind=op_kind, counters=static, verified=verified))
    return OpsReport(rows=rows)
