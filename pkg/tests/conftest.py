"""Shared fixtures: one pair of chain domains and enrolled users per session.

Pure-Python pairings are slow, so keys are built once and reused; trial counts
default small and scale with PHRBRIDGE_TRIALS.
"""

from __future__ import annotations

import os

import pytest

os.environ.setdefault("PHRBRIDGE_TEST_HOOKS", "1")
os.environ.setdefault("PHRBRIDGE_LOG_LEVEL", "WARNING")

from phrbridge.crypto.hpre import (  # noqa: E402
    clc_partial_keygen,
    clc_user_keygen,
    ibe_keygen,
    setup_clc,
    setup_ibe,
)
from phrbridge.crypto.pairing import SeededRng, get_context  # noqa: E402


@pytest.fixture(scope="session")
def ctx():
    return get_context()


@pytest.fixture
def rng():
    return SeededRng(20240314)


@pytest.fixture(scope="session")
def trials() -> int:
    return int(os.getenv("PHRBRIDGE_TRIALS", "3"))


@pytest.fixture(scope="session")
def domains(ctx):
    """(par1, msk1, par2, msk2) for Hospital A (IBE) and Hospital B (CLC)."""
    rng = SeededRng(7)
    par1, msk1 = setup_ibe(ctx, rng)
    par2, msk2 = setup_clc(ctx, rng)
    return par1, msk1, par2, msk2


@pytest.fixture(scope="session")
def par1(domains):
    return domains[0]


@pytest.fixture(scope="session")
def par2(domains):
    return domains[2]


@pytest.fixture(scope="session")
def owner(domains):
    return ibe_keygen(domains[1], b"alice@hospital-a")


@pytest.fixture(scope="session")
def user(domains):
    return clc_user_keygen(clc_partial_keygen(domains[3], b"bob@hospital-b"), domains[2], SeededRng(11))


@pytest.fixture(scope="session")
def other_user(domains):
    return clc_user_keygen(clc_partial_keygen(domains[3], b"carol@hospital-b"), domains[2], SeededRng(13))
