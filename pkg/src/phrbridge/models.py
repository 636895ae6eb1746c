"""Pydantic models and enums for PHRBridge reports, transcripts and config."""

from __future__ import annotations

from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field


class OpKind(str, Enum):
    ENCRYPT = "Encrypt"
    DECRYPT_FIRST = "DecryptFirst"
    REKEYGEN = "ReKeyGen"
    REENCRYPT = "ReEncrypt"
    DECRYPT_SECOND = "DecryptSecond"
    QUERY = "Query"


class OutputFormat(str, Enum):
    CSV = "csv"
    MARKDOWN = "markdown"


class SizeMode(str, Enum):
    NOMINAL = "nominal"
    ACTUAL = "actual"


class Verdict(str, Enum):
    ACCEPT = "Accept"
    DECRYPT_FAIL = "DecryptFail"
    STALE = "Stale"
    REPLAY = "Replay"
    UNKNOWN_IDENTITY = "UnknownIdentity"
    MALFORMED = "Malformed"
    OVERLOADED = "Overloaded"


class OpCounters(BaseModel):
    """Expensive-operation tally for one scheme operation."""
    model_config = ConfigDict(frozen=True)

    pairings: int = Field(default=0, ge=0)
    base_exps: int = Field(default=0, ge=0)
    id_exps: int = Field(default=0, ge=0)
    target_exps: int = Field(default=0, ge=0)
    hashes_h1: int = Field(default=0, ge=0)
    hashes_h2: int = Field(default=0, ge=0)
    target_muls: int = Field(default=0, ge=0)

    def __add__(self, other: OpCounters) -> OpCounters:
        return OpCounters(**{
            name: getattr(self, name) + getattr(other, name)
            for name in OpCounters.model_fields
        })


class SizeModel(BaseModel):
    """Per-element byte sizes used to price a component."""
    mode: SizeMode = SizeMode.NOMINAL
    g1_bytes: int = Field(default=128, gt=0)
    g2_bytes: int = Field(default=128, gt=0)
    zq_bytes: int = Field(default=20, gt=0)


class SizeRow(BaseModel):
    """Element counts and byte total for one component."""
    component: str
    n_g1: int = 0
    n_g2: int = 0
    n_zq: int = 0
    nbytes: int = 0
    note: str | None = None


class SizeReport(BaseModel):
    """Communication-overhead report for the scheme (plus optional literal rows)."""
    model: SizeModel
    scheme: str = "Ours"
    rows: list[SizeRow] = Field(default_factory=list)
    total_bytes: int = 0
    flags: list[str] = Field(default_factory=list)
    published_rows: dict[str, list[SizeRow]] = Field(default_factory=dict)

    def row(self, component: str) -> SizeRow:
        for r in self.rows:
            if r.component == component:
                return r
        raise KeyError(component)


class OpsRow(BaseModel):
    op_kind: OpKind
    counters: OpCounters
    verified: bool | None = None


class OpsReport(BaseModel):
    rows: list[OpsRow] = Field(default_factory=list)


class TimingRow(BaseModel):
    n_users: int
    enc_ms_median: float
    query_ms_median: float
    trials: int


class TimingReport(BaseModel):
    payload_size: int
    parallel: bool = False
    rows: list[TimingRow] = Field(default_factory=list)


class TranscriptEntry(BaseModel):
    """One routed message as seen by the gateway (no contents, only metadata)."""
    model_config = ConfigDict(frozen=True)

    source: str
    destination: str
    msg_type: str
    length: int
    timestamp_ms: int

    def line(self) -> str:
        return f"{self.source}->{self.destination} {self.msg_type} {self.length}B t={self.timestamp_ms}"


class CliConfig(BaseModel):
    """Resolved CLI configuration (flags > config file > environment)."""
    store_dir: Path
    seed: int | None = Field(default=None, ge=0, lt=2**64)
    freshness_window_s: float = Field(default=120.0, ge=0)
    output_format: OutputFormat = OutputFormat.MARKDOWN
    nonce_capacity: int = Field(default=2**16, gt=0)
    cache_dir: Path | None = None
