"""Exception hierarchy for PHRBridge."""

from __future__ import annotations


class PhrBridgeError(Exception):
    """Base class for all PHRBridge errors."""


# --- Decoding -----------------------------------------------------------------

class DecodeError(PhrBridgeError, ValueError):
    """Bytes do not decode to a valid element, key, ciphertext or message."""


class LengthError(DecodeError):
    """Encoding has the wrong length for its type."""

    def __init__(self, kind: str, expected: int, actual: int) -> None:
        super().__init__(f"{kind}: expected {expected} bytes, got {actual}")
        self.kind = kind
        self.expected = expected
        self.actual = actual


# --- Cryptography -------------------------------------------------------------

class CryptoError(PhrBridgeError):
    """A cryptographic check failed."""


class PartialKeyInvalid(CryptoError, ValueError):
    """KGC partial key does not satisfy e(h2, H1(id)) = e(g, d)."""


class AuthFailure(CryptoError):
    """Authenticated decryption of a DEM payload failed (tamper or wrong key)."""


class KeyMismatch(CryptoError):
    """Key kind does not match the ciphertext level."""


# --- Store --------------------------------------------------------------------

class StoreError(PhrBridgeError):
    """Blob store or access list failure."""


class NotFound(StoreError, KeyError):
    """No blob stored under the requested content id."""


class DigestMismatch(StoreError):
    """Stored bytes no longer hash to their content id."""


class DuplicateDataId(StoreError, ValueError):
    """data_id already registered with a different entry."""


class UnknownDataId(StoreError, KeyError):
    """data_id is not registered in the access list."""


# --- Protocol -----------------------------------------------------------------

class ProtocolError(PhrBridgeError):
    """Message-flow failure."""


class FreshnessError(ProtocolError):
    """Timestamp/nonce freshness check failed."""


class Stale(FreshnessError):
    """Timestamp outside the freshness window."""


class Replay(FreshnessError):
    """Nonce already seen within the retention horizon."""


class NonceCacheFull(FreshnessError):
    """Nonce cache is at capacity and no entry has expired yet."""


class UnknownDestination(ProtocolError, KeyError):
    """Gateway has no node registered under that name."""


class UnknownIdentity(ProtocolError):
    """Public key does not belong to any registered identity."""


class ScenarioFailure(ProtocolError):
    """A stage of the end-to-end sharing flow failed."""

    def __init__(self, stage: str, cause: BaseException | str) -> None:
        detail = cause if isinstance(cause, str) else f"{type(cause).__name__}: {cause}"
        super().__init__(f"stage '{stage}' failed: {detail}")
        self.stage = stage
        self.cause = cause


# --- Bench --------------------------------------------------------------------

class BenchError(PhrBridgeError):
    """Benchmark/reporting failure."""


class UnknownFormat(BenchError, ValueError):
    """Requested output format is not supported."""
