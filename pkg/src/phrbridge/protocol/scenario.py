"""End-to-end two-chain deployment and sharing flow."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field

from ..crypto.hpre import setup_clc, setup_ibe
from ..crypto.pairing import PairingCtx, Rng, get_context
from ..errors import PhrBridgeError, ProtocolError, ScenarioFailure
from ..models import TranscriptEntry
from ..store import AccessList, BlobStore, ContentId, MemoryBlobStore
from .clock import Clock
from .freshness import DEFAULT_CAPACITY, DEFAULT_WINDOW_MS, FreshnessPolicy
from .gateway import Gateway
from .messages import RelayJob, SharingPermission, SharingResponse
from .nodes import DataOwner, DataUser, HospitalA, HospitalB, Relay

logger = logging.getLogger(__name__)

DATA_ID_LEN = 16

STAGES = ("encrypt_store", "request", "verify_request", "authorize", "forward", "relay", "respond")


@contextmanager
def _stage(name: str) -> Iterator[None]:
    try:
        yield
    except ScenarioFailure:
        raise
    except (PhrBridgeError, ValueError, TypeError, KeyError) as exc:
        logger.error(f"Stage '{name}' failed: {exc}")
        raise ScenarioFailure(name, exc) from exc


@dataclass
class ShareResult:
    payload: bytes
    data_id: bytes
    address: ContentId
    transcript: list[TranscriptEntry] = field(default_factory=list)


@dataclass
class Deployment:
    """Both hospitals, one owner, one user, a relay and the gateway between them."""
    hospital_a: HospitalA
    hospital_b: HospitalB
    owner: DataOwner
    user: DataUser
    relay: Relay
    gateway: Gateway
    clock: Clock
    rng: Rng

    @classmethod
    def create(
        cls,
        rng: Rng,
        clock: Clock,
        *,
        window_ms: int = DEFAULT_WINDOW_MS,
        nonce_capacity: int = DEFAULT_CAPACITY,
        owner_id: bytes = b"owner@hospital-a",
        user_id: bytes = b"user@hospital-b",
        store: BlobStore | None = None,
        access: AccessList | None = None,
        ctx: PairingCtx | None = None,
    ) -> Deployment:
        """Set up both chains, enrol one owner and one user, publish the user registry."""
        ctx = ctx or get_context()

        def policy() -> FreshnessPolicy:
            return FreshnessPolicy(window_ms=window_ms, capacity=nonce_capacity)

        par1, msk1 = setup_ibe(ctx, rng)
        par2, msk2 = setup_clc(ctx, rng)
        hospital_a = HospitalA(
            params=par1,
            master=msk1,
            policy=policy(),
            store=store if store is not None else MemoryBlobStore(),
            access=access if access is not None else AccessList(),
        )
        hospital_b = HospitalB(params=par2, master=msk2)

        owner = DataOwner(keypair=hospital_a.enroll_owner(owner_id), params=par1, policy=policy())
        user = DataUser.enroll(hospital_b.issue_partial(user_id), par2, rng, policy=policy())
        relay = Relay(policy=policy())

        gateway = Gateway()
        for node in (hospital_a, hospital_b, owner, user, relay):
            gateway.register(node.name)
        gateway.publish_identities(hospital_b.name, hospital_b.registry())
        owner.trust_identities(gateway.identities(hospital_b.name))
        logger.info("Deployment ready: two chains, one owner, one user")
        return cls(hospital_a, hospital_b, owner, user, relay, gateway, clock, rng)

    def _take(self, name: str) -> bytes:
        data = self.gateway.receive(name)
        if data is None:
            raise ProtocolError(f"mailbox of {name} is empty")
        return data

    def store(self, payload: bytes, data_id: bytes | None = None) -> tuple[bytes, ContentId]:
        data_id = data_id if data_id is not None else self.rng.token_bytes(DATA_ID_LEN)
        with _stage("encrypt_store"):
            address = self.owner.store_phr(self.hospital_a, payload, data_id, self.rng)
        return data_id, address

    def share(self, payload: bytes, data_id: bytes | None = None) -> ShareResult:
        """Store ``payload`` then run M1 -> M2 -> relay job -> M3 and decrypt it."""
        start = len(self.gateway.transcript())
        data_id, address = self.store(payload, data_id)
        recovered = self.request_and_fetch(data_id)
        if recovered != payload:
            raise ScenarioFailure("respond", "recovered payload differs from the stored PHR")
        return ShareResult(
            payload=recovered,
            data_id=data_id,
            address=address,
            transcript=self.gateway.transcript()[start:],
        )

    def request_and_fetch(self, data_id: bytes) -> bytes:
        a, o, u, r = self.hospital_a, self.owner, self.user, self.relay
        with _stage("request"):
            m1 = u.build_request(o.pk, o.params, self.clock, self.rng)
            self.gateway.route(m1, o.name, source=u.name)

        with _stage("verify_request"):
            verdict = o.verify_request(self._take(o.name), self.clock)
            if not verdict.accepted or verdict.request is None:
                raise ScenarioFailure("verify_request", verdict.error or verdict.verdict.value)

        with _stage("authorize"):
            m2 = o.authorize(verdict.request, data_id, self.rng, self.clock)
            self.gateway.route(m2, a.name, source=o.name)

        with _stage("forward"):
            job = a.forward(SharingPermission.from_bytes(self._take(a.name)), self.clock, self.rng)
            self.gateway.route(job, r.name, source=a.name)

        with _stage("relay"):
            m3 = r.process(RelayJob.from_bytes(self._take(r.name)), self.clock, self.rng)
            self.gateway.route(m3, u.name, source=r.name)

        with _stage("respond"):
            return u.handle_response(SharingResponse.from_bytes(self._take(u.name)), self.clock)
