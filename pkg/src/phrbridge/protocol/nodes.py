"""Entity nodes of the two-chain deployment.

Each node holds only the material its role owns:

* ``HospitalA``: IBE master key, blob store, access list.
* ``HospitalB``: CLC master key and its enrolment registry.
* ``DataOwner``: the owner's IBE key pair.
* ``DataUser``: the user's CLC key pair.
* ``Relay``: a freshness policy and nothing else.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..crypto import wire
from ..crypto.hpre import (
    ClcKeyPair,
    ClcMasterKey,
    ClcPartialKey,
    ClcSystemParams,
    IbeKeyPair,
    IbeMasterKey,
    IbeSystemParams,
    clc_partial_keygen,
    clc_user_keygen,
    ibe_keygen,
    rekeygen,
)
from ..crypto.hybrid import HybridCiphertext, hybrid_decrypt_second, hybrid_encrypt, hybrid_reencrypt
from ..crypto.pairing import IdElem, Rng, hash_to_id_group
from ..errors import (
    AuthFailure,
    DecodeError,
    FreshnessError,
    KeyMismatch,
    NonceCacheFull,
    Replay,
    Stale,
    UnknownIdentity,
)
from ..models import Verdict
from ..store import AccessList, BlobStore, ContentId, MemoryBlobStore
from .clock import Clock
from .freshness import NONCE_LEN, FreshnessPolicy
from .messages import AccessRequest, RelayJob, SealedRequest, SharingPermission, SharingResponse

logger = logging.getLogger(__name__)


def _fresh(clock: Clock, rng: Rng) -> tuple[int, bytes]:
    return clock.now_ms(), rng.token_bytes(NONCE_LEN)


_FRESHNESS_VERDICTS: dict[type[FreshnessError], Verdict] = {
    Stale: Verdict.STALE,
    Replay: Verdict.REPLAY,
    NonceCacheFull: Verdict.OVERLOADED,
}


@dataclass(frozen=True)
class RequestVerdict:
    verdict: Verdict
    request: AccessRequest | None = None
    reason: str = ""
    error: Exception | None = None

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT


# ---------------------------------------------------------------------------
# Hospitals
# ---------------------------------------------------------------------------


@dataclass
class HospitalA:
    """IBE key generation centre plus the chain's storage and access list."""
    params: IbeSystemParams
    master: IbeMasterKey = field(repr=False)
    policy: FreshnessPolicy = field(default_factory=FreshnessPolicy)
    store: BlobStore = field(default_factory=MemoryBlobStore)
    access: AccessList = field(default_factory=AccessList)
    name: str = "hospital_a"

    def enroll_owner(self, id: bytes) -> IbeKeyPair:
        keypair = ibe_keygen(self.master, id)
        logger.info(f"{self.name}: issued IBE key for {id!r}")
        return keypair

    def store_ciphertext(self, data_id: bytes, blob: bytes, owner_pk: IdElem) -> ContentId:
        address = self.store.put(blob)
        if data_id in self.access:
            entry = self.access.lookup(data_id)
            if entry.address == address and entry.owner_pk == owner_pk:
                logger.info(f"{self.name}: data_id {data_id.hex()} already stored at this address")
                return address
        self.access.register(data_id, address, owner_pk)
        return address

    def forward(self, m2: SharingPermission, clock: Clock, rng: Rng) -> RelayJob:
        """Re-check M2, fetch the registered ciphertext and bundle both for the relay."""
        self.policy.check(m2.t_ms, m2.nonce, clock.now_ms())
        entry = self.access.lookup(m2.data_id)
        if entry.owner_pk != m2.pk_do:
            raise UnknownIdentity(f"data_id {m2.data_id.hex()} is not owned by the authorizing key")
        blob = self.store.get(entry.address)
        t_ms, nonce = _fresh(clock, rng)
        logger.info(f"{self.name}: forwarding data_id {m2.data_id.hex()} ({len(blob)} bytes) to relay")
        return RelayJob(m2=m2, blob=blob, t_ms=t_ms, nonce=nonce)


@dataclass
class HospitalB:
    """CLC key generation centre; issues partial keys and records enrolments."""
    params: ClcSystemParams
    master: ClcMasterKey = field(repr=False)
    enrolled: set[bytes] = field(default_factory=set)
    name: str = "hospital_b"

    def issue_partial(self, id: bytes) -> ClcPartialKey:
        partial = clc_partial_keygen(self.master, id)
        self.enrolled.add(bytes(id))
        logger.info(f"{self.name}: issued partial key for {id!r}")
        return partial

    def registry(self) -> frozenset[bytes]:
        return frozenset(self.enrolled)


# ---------------------------------------------------------------------------
# Users
# ---------------------------------------------------------------------------


@dataclass
class DataOwner:
    keypair: IbeKeyPair = field(repr=False)
    params: IbeSystemParams
    policy: FreshnessPolicy = field(default_factory=FreshnessPolicy)
    name: str = "data_owner"
    _known_users: dict[IdElem, bytes] = field(init=False, default_factory=dict)

    @property
    def pk(self) -> IdElem:
        return self.keypair.pk

    def trust_identities(self, ids: frozenset[bytes] | set[bytes]) -> None:
        """Cache H1 of each enrolled user identity for request verification."""
        for id in ids:
            if id not in self._known_users.values():
                self._known_users[hash_to_id_group(id)] = bytes(id)

    def store_phr(self, hospital: HospitalA, payload: bytes, data_id: bytes, rng: Rng) -> ContentId:
        envelope = hybrid_encrypt(self.params, self.pk, payload, rng)
        address = hospital.store_ciphertext(data_id, wire.encode(envelope), self.pk)
        logger.info(f"{self.name}: stored PHR {data_id.hex()} ({len(payload)} bytes)")
        return address

    def verify_request(self, m1: SealedRequest | bytes, clock: Clock) -> RequestVerdict:
        """Check an incoming M1; every failure is reported as a verdict, never raised."""
        try:
            sealed = SealedRequest.from_bytes(m1) if isinstance(m1, bytes) else m1
        except DecodeError as exc:
            return RequestVerdict(Verdict.MALFORMED, reason=str(exc), error=exc)
        try:
            request = sealed.open(self.keypair.sk)
        except (AuthFailure, KeyMismatch) as exc:
            return RequestVerdict(Verdict.DECRYPT_FAIL, reason=str(exc), error=exc)
        except DecodeError as exc:
            return RequestVerdict(Verdict.MALFORMED, reason=str(exc), error=exc)
        if request.pk_do != self.pk:
            exc = UnknownIdentity("request is addressed to a different owner key")
            return RequestVerdict(Verdict.UNKNOWN_IDENTITY, request, str(exc), exc)
        du_id = self._known_users.get(request.pk_du.pk1)
        if du_id is None or request.pk_du.pk2.is_identity():
            exc = UnknownIdentity("pk_du does not belong to an enrolled data user")
            return RequestVerdict(Verdict.UNKNOWN_IDENTITY, request, str(exc), exc)
        try:
            self.policy.check(request.t_ms, request.nonce, clock.now_ms())
        except FreshnessError as exc:
            verdict = _FRESHNESS_VERDICTS[type(exc)]
            logger.warning(f"{self.name}: rejected request from {du_id!r}: {verdict.value}")
            return RequestVerdict(verdict, request, str(exc), exc)
        logger.info(f"{self.name}: accepted request from {du_id!r}")
        return RequestVerdict(Verdict.ACCEPT, request)

    def authorize(self, request: AccessRequest, data_id: bytes, rng: Rng, clock: Clock) -> SharingPermission:
        rk = rekeygen(self.keypair.sk, request.pk_du, rng, self.params.ctx)
        t_ms, nonce = _fresh(clock, rng)
        logger.info(f"{self.name}: authorized sharing of {data_id.hex()}")
        return SharingPermission(
            pk_do=self.pk,
            pk_du=request.pk_du,
            rk=rk,
            data_id=bytes(data_id),
            t_ms=t_ms,
            nonce=nonce,
        )


@dataclass
class DataUser:
    keypair: ClcKeyPair = field(repr=False)
    policy: FreshnessPolicy = field(default_factory=FreshnessPolicy)
    name: str = "data_user"

    @classmethod
    def enroll(
        cls,
        partial: ClcPartialKey,
        par2: ClcSystemParams,
        rng: Rng,
        policy: FreshnessPolicy | None = None,
    ) -> DataUser:
        """Turn a KGC partial key into a full CLC key pair (raises PartialKeyInvalid)."""
        return cls(keypair=clc_user_keygen(partial, par2, rng), policy=policy or FreshnessPolicy())

    def build_request(self, pk_do: IdElem, par1: IbeSystemParams, clock: Clock, rng: Rng) -> SealedRequest:
        t_ms, nonce = _fresh(clock, rng)
        request = AccessRequest(pk_do=pk_do, pk_du=self.keypair.public, t_ms=t_ms, nonce=nonce)
        return request.seal(par1, rng)

    def handle_response(self, m3: SharingResponse, clock: Clock) -> bytes:
        self.policy.check(m3.t_ms, m3.nonce, clock.now_ms())
        payload = hybrid_decrypt_second(self.keypair.sk, m3.ct)
        logger.info(f"{self.name}: recovered {len(payload)} byte PHR")
        return payload


# ---------------------------------------------------------------------------
# Relay
# ---------------------------------------------------------------------------


@dataclass
class Relay:
    """Untrusted proxy: holds no key material, only its freshness state."""
    policy: FreshnessPolicy = field(default_factory=FreshnessPolicy)
    name: str = "relay"

    def process(self, job: RelayJob, clock: Clock, rng: Rng) -> SharingResponse:
        m2 = job.m2
        self.policy.check(job.t_ms, job.nonce, clock.now_ms())
        self.policy.check(m2.t_ms, m2.nonce, clock.now_ms())
        envelope = wire.decode_as(job.blob, HybridCiphertext)
        if envelope.level != 1:
            raise DecodeError("relay job blob is not a first-level envelope")
        ct = hybrid_reencrypt(envelope, m2.rk)
        t_ms, nonce = _fresh(clock, rng)
        logger.info(f"{self.name}: re-encrypted {m2.data_id.hex()}")
        return SharingResponse(ct=ct, t_ms=t_ms, nonce=nonce)
