"""Wall-clock sweeps of Enc and Query cost versus number of users."""

from __future__ import annotations

import logging
import statistics
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor

from ..crypto.hpre import clc_partial_keygen, clc_user_keygen, encrypt, ibe_keygen, rekeygen, setup_clc, setup_ibe
from ..crypto.hybrid import hybrid_encrypt, hybrid_reencrypt
from ..crypto.pairing import Rng, SeededRng, get_context
from ..models import TimingReport, TimingRow

logger = logging.getLogger(__name__)


def _time_point(n_users: int, trials: int, seed: int, payload_size: int) -> TimingRow:
    """Median total time of ``n_users`` Enc and ``n_users`` Query operations."""
    rng = SeededRng(seed)
    ctx = get_context()
    par1, msk1 = setup_ibe(ctx, rng)
    par2, msk2 = setup_clc(ctx, rng)
    owner = ibe_keygen(msk1, b"timing-owner")
    user = clc_user_keygen(clc_partial_keygen(msk2, b"timing-user"), par2, rng)
    envelope = hybrid_encrypt(par1, owner.pk, rng.token_bytes(payload_size), rng)

    enc_ms: list[float] = []
    query_ms: list[float] = []
    for _ in range(trials):
        m = ctx.random_target(rng)
        start = time.perf_counter()
        for _ in range(n_users):
            encrypt(par1, owner.pk, m, rng)
        enc_ms.append((time.perf_counter() - start) * 1000)

        start = time.perf_counter()
        for _ in range(n_users):
            hybrid_reencrypt(envelope, rekeygen(owner.sk, user.public, rng, ctx))
        query_ms.append((time.perf_counter() - start) * 1000)

    row = TimingRow(
        n_users=n_users,
        enc_ms_median=statistics.median(enc_ms),
        query_ms_median=statistics.median(query_ms),
        trials=trials,
    )
    logger.info(f"n={n_users}: enc {row.enc_ms_median:.1f} ms, query {row.query_ms_median:.1f} ms")
    return row


def _time_point_args(args: tuple[int, int, int, int]) -> TimingRow:
    return _time_point(*args)


def run_timing(
    sweep: Sequence[int],
    trials: int,
    rng: Rng,
    payload_size: int = 1024,
    workers: int = 1,
) -> TimingReport:
    """Time each sweep point; ``workers > 1`` spreads points over processes."""
    if not sweep:
        raise ValueError("sweep must contain at least one user count")
    if any(n < 1 for n in sweep):
        raise ValueError("every sweep entry must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if payload_size < 0:
        raise ValueError("payload_size must be non-negative")

    jobs = [(n, trials, rng.randbelow(2 ** 63), payload_size) for n in sweep]
    if workers > 1:
        logger.info(f"Timing {len(jobs)} sweep points on {workers} processes")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_time_point_args, jobs))
    else:
        rows = [_time_point_args(job) for job in jobs]
    return TimingReport(payload_size=payload_size, parallel=workers > 1, rows=rows)
