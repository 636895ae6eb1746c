"""Typer CLI entry point for PHRBridge."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, Optional, TypeVar

import typer
from pydantic import ValidationError
from rich.console import Console

from .bench.counts import ops_report
from .bench.sizes import measure_sizes
from .bench.tables import emit_table
from .bench.timing import run_timing
from .cache import HashCache
from .config import build_cli_config, get_settings
from .crypto import wire
from .crypto.hpre import (
    ClcKeyPair,
    ClcMasterKey,
    ClcPublicKey,
    ClcSystemParams,
    IbeKeyPair,
    IbeMasterKey,
    IbePublicKey,
    IbeSystemParams,
    ReEncryptionKey,
    clc_partial_keygen,
    clc_user_keygen,
    ibe_keygen,
    rekeygen,
    setup_clc,
    setup_ibe,
)
from .crypto.hybrid import (
    HybridCiphertext,
    hybrid_decrypt_first,
    hybrid_decrypt_second,
    hybrid_encrypt,
    hybrid_reencrypt,
)
from .crypto.pairing import CURVE_NAME, Rng, get_context, make_rng, using_hash_cache
from .errors import (
    BenchError,
    CryptoError,
    DecodeError,
    NotFound,
    PhrBridgeError,
    ScenarioFailure,
    StoreError,
)
from .models import CliConfig, SizeMode, SizeModel
from .protocol.clock import Clock, ManualClock, SystemClock
from .protocol.scenario import Deployment
from .store import AccessList, DirectoryBlobStore

app = typer.Typer(
    name="phrbridge",
    help="PHRBridge: cross-domain PHR sharing with IBE-to-CLC proxy re-encryption",
    rich_markup_mode="rich",
    no_args_is_help=True,
)
bench_app = typer.Typer(help="Overhead analysis: serialized sizes, op counts, timing sweeps.")
app.add_typer(bench_app, name="bench")

console = Console(stderr=True)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SCENARIO = 1
EXIT_USAGE = 2
EXIT_DECODE = 3
EXIT_CRYPTO = 4
EXIT_STORE = 5

DEMO_EPOCH_MS = 1_700_000_000_000
SAMPLE_PHR = (
    b"patient: 0001\n"
    b"blood_type: O+\n"
    b"allergies: penicillin\n"
    b"last_visit: 2024-03-14\n"
    b"notes: follow-up in six weeks\n"
)

T = TypeVar("T")


class Role(str, Enum):
    IBE = "ibe"
    CLC = "clc"


def _setup_logging(verbose: bool = False, log_dir: Path | None = None, level_name: str = "INFO") -> None:
    level = logging.DEBUG if verbose else getattr(logging, level_name.upper(), logging.INFO)
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_dir / "phrbridge.log", encoding="utf-8"))
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
        handlers=handlers,
        force=True,
    )


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ScenarioFailure):
        return EXIT_SCENARIO
    if isinstance(exc, DecodeError):
        return EXIT_DECODE
    if isinstance(exc, CryptoError):
        return EXIT_CRYPTO
    if isinstance(exc, StoreError):
        return EXIT_STORE
    return EXIT_USAGE


@contextmanager
def _handle_errors() -> Iterator[None]:
    """Map domain exceptions to stable exit codes."""
    try:
        yield
    except ScenarioFailure as exc:
        console.print(f"[red]Scenario failed:[/red] {exc}")
        raise typer.Exit(EXIT_SCENARIO) from exc
    except (PhrBridgeError, ValueError) as exc:
        code = _exit_code(exc)
        console.print(f"[red]{type(exc).__name__}:[/red] {exc}")
        raise typer.Exit(code) from exc
    except OSError as exc:
        console.print(f"[red]{exc}[/red]")
        raise typer.Exit(EXIT_STORE) from exc


def _config(ctx: typer.Context) -> CliConfig:
    return ctx.ensure_object(dict)["config"]


def _rng(ctx: typer.Context) -> Rng:
    return make_rng(_config(ctx).seed)


def _read_wire(path: Path, cls: type[T]) -> T:
    return wire.decode_as(path.read_bytes(), cls)


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _load_or_setup(store_dir: Path, role: Role, rng: Rng) -> tuple[Any, Any]:
    """Chain parameters and master key from the store dir, created on first use."""
    params_path = store_dir / f"{role.value}.params"
    master_path = store_dir / f"{role.value}.master"
    params_cls, master_cls = (
        (IbeSystemParams, IbeMasterKey) if role is Role.IBE else (ClcSystemParams, ClcMasterKey)
    )
    if params_path.exists() and master_path.exists():
        return _read_wire(params_path, params_cls), _read_wire(master_path, master_cls)
    setup = setup_ibe if role is Role.IBE else setup_clc
    params, master = setup(get_context(), rng)
    _write(params_path, wire.encode(params))
    _write(master_path, wire.encode(master))
    console.print(f"[green]Initialised {role.value.upper()} domain[/green] in {store_dir}")
    return params, master


def _load_params(store_dir: Path) -> IbeSystemParams:
    path = store_dir / "ibe.params"
    if not path.exists():
        raise NotFound(f"{path} not found; run 'phrbridge keygen --role ibe' first")
    return _read_wire(path, IbeSystemParams)


@app.callback()
def main(
    ctx: typer.Context,
    store_dir: Optional[Path] = typer.Option(None, "--store-dir", help="Directory for keys, blobs and logs"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Deterministic RNG seed (also PHRBRIDGE_SEED)"),
    window_s: Optional[float] = typer.Option(None, "--window-s", help="Freshness window in seconds"),
    output_format: Optional[str] = typer.Option(None, "--format", help="Table format: markdown or csv"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="TOML config file"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
) -> None:
    """Resolve configuration once for every subcommand."""
    try:
        settings = get_settings()
        config = build_cli_config(
            settings,
            config_file,
            store_dir=store_dir,
            seed=seed,
            window_s=window_s,
            format=output_format,
        )
        if settings.curve != CURVE_NAME:
            raise ValueError(f"unsupported curve {settings.curve!r}; only {CURVE_NAME} is available")
    except (ValidationError, ValueError, OSError) as exc:
        console.print(f"[red]Invalid configuration:[/red] {exc}")
        raise typer.Exit(EXIT_USAGE) from exc

    uses_store = ctx.invoked_subcommand != "bench"
    _setup_logging(verbose, config.store_dir / "logs" if uses_store else None, settings.log_level)
    ctx.ensure_object(dict)["config"] = config
    if uses_store and config.cache_dir is not None:
        cache = ctx.with_resource(HashCache(config.cache_dir))
        ctx.with_resource(using_hash_cache(cache))


# ---------------------------------------------------------------------------
# Demo
# ---------------------------------------------------------------------------


@app.command()
def demo(
    ctx: typer.Context,
    phr: Optional[Path] = typer.Option(None, "--phr", help="PHR file to share (default: built-in sample)"),
    transcript_out: Optional[Path] = typer.Option(None, "--transcript-out", help="Also write the transcript here"),
) -> None:
    """Run the full two-chain sharing flow and print the message transcript."""
    config = _config(ctx)
    rng = _rng(ctx)
    clock: Clock = ManualClock(DEMO_EPOCH_MS, tick_ms=1) if config.seed is not None else SystemClock()

    with _handle_errors():
        payload = phr.read_bytes() if phr is not None else SAMPLE_PHR
        deployment = Deployment.create(
            rng,
            clock,
            window_ms=int(round(config.freshness_window_s * 1000)),
            nonce_capacity=config.nonce_capacity,
            store=DirectoryBlobStore(config.store_dir / "blobs"),
            access=AccessList(config.store_dir / "access.list"),
        )
        try:
            result = deployment.share(payload)
        finally:
            lines = [entry.line() for entry in deployment.gateway.transcript()]
            for line in lines:
                typer.echo(line)
            if transcript_out is not None:
                _write(transcript_out, "".join(f"{line}\n" for line in lines).encode("utf-8"))

    console.print(
        f"[green]PHR recovered:[/green] {len(result.payload)} bytes, "
        f"data_id {result.data_id.hex()}, address {result.address.hex()[:16]}"
    )


# ---------------------------------------------------------------------------
# Scheme operations
# ---------------------------------------------------------------------------


@app.command()
def keygen(
    ctx: typer.Context,
    role: Role = typer.Option(..., "--role", help="ibe (data owner) or clc (data user)"),
    identity: str = typer.Option(..., "--id", help="Identity string"),
    out: Path = typer.Option(..., "--out", help="Output prefix: writes PREFIX.key and PREFIX.pub"),
) -> None:
    """Issue a key pair, setting up the chain's parameters on first use."""
    config = _config(ctx)
    rng = _rng(ctx)
    with _handle_errors():
        params, master = _load_or_setup(config.store_dir, role, rng)
        id_bytes = identity.encode("utf-8")
        keypair: IbeKeyPair | ClcKeyPair
        if role is Role.IBE:
            keypair = ibe_keygen(master, id_bytes)
        else:
            keypair = clc_user_keygen(clc_partial_keygen(master, id_bytes), params, rng)
        key_path = out.with_name(out.name + ".key")
        pub_path = out.with_name(out.name + ".pub")
        _write(key_path, wire.encode(keypair))
        _write(pub_path, wire.encode(keypair.public))
    console.print(f"[green]Wrote[/green] {key_path} and {pub_path}")


@app.command()
def encrypt(
    ctx: typer.Context,
    pub: Path = typer.Argument(..., help="Data owner's IBE public key file"),
    infile: Path = typer.Argument(..., help="Plaintext PHR"),
    outfile: Path = typer.Argument(..., help="First-level hybrid ciphertext"),
) -> None:
    """Encrypt a PHR for a data owner."""
    config = _config(ctx)
    with _handle_errors():
        par1 = _load_params(config.store_dir)
        public = _read_wire(pub, IbePublicKey)
        envelope = hybrid_encrypt(par1, public.pk, infile.read_bytes(), _rng(ctx))
        _write(outfile, wire.encode(envelope))
    console.print(f"[green]Encrypted[/green] {infile} -> {outfile}")


@app.command()
def rekey(
    ctx: typer.Context,
    dokey: Path = typer.Argument(..., help="Data owner's IBE private key file"),
    clcpub: Path = typer.Argument(..., help="Data user's CLC public key file"),
    outfile: Path = typer.Argument(..., help="Re-encryption key"),
) -> None:
    """Derive a re-encryption key from a data owner to a data user."""
    with _handle_errors():
        owner = _read_wire(dokey, IbeKeyPair)
        user_pk = _read_wire(clcpub, ClcPublicKey)
        _write(outfile, wire.encode(rekeygen(owner.sk, user_pk, _rng(ctx))))
    console.print(f"[green]Wrote[/green] {outfile}")


@app.command()
def reencrypt(
    ctx: typer.Context,
    ct: Path = typer.Argument(..., help="First-level hybrid ciphertext"),
    rk: Path = typer.Argument(..., help="Re-encryption key"),
    outfile: Path = typer.Argument(..., help="Second-level hybrid ciphertext"),
) -> None:
    """Proxy step: transform a first-level ciphertext for the key's data user."""
    with _handle_errors():
        envelope = _read_wire(ct, HybridCiphertext)
        if envelope.level != 1:
            raise DecodeError(f"{ct} is not a first-level ciphertext")
        key = _read_wire(rk, ReEncryptionKey)
        _write(outfile, wire.encode(hybrid_reencrypt(envelope, key)))
    console.print(f"[green]Re-encrypted[/green] {ct} -> {outfile}")


@app.command()
def decrypt(
    ctx: typer.Context,
    key: Path = typer.Argument(..., help="IBE or CLC private key file"),
    ct: Path = typer.Argument(..., help="Hybrid ciphertext"),
    outfile: Path = typer.Argument(..., help="Recovered plaintext"),
) -> None:
    """Decrypt with an owner key (first level) or a user key (second level)."""
    with _handle_errors():
        keypair = wire.decode(key.read_bytes())
        envelope = _read_wire(ct, HybridCiphertext)
        if isinstance(keypair, IbeKeyPair):
            payload = hybrid_decrypt_first(keypair.sk, envelope)
        elif isinstance(keypair, ClcKeyPair):
            payload = hybrid_decrypt_second(keypair.sk, envelope)
        else:
            raise DecodeError(f"{key} does not hold a private key")
        _write(outfile, payload)
    console.print(f"[green]Decrypted[/green] {ct} -> {outfile} ({len(payload)} bytes)")


# ---------------------------------------------------------------------------
# Bench
# ---------------------------------------------------------------------------


def _emit(ctx: typer.Context, report: Any) -> None:
    typer.echo(emit_table(report, _config(ctx).output_format).decode("utf-8"), nl=False)


@bench_app.command("sizes")
def bench_sizes(
    ctx: typer.Context,
    model: SizeMode = typer.Option(SizeMode.NOMINAL, "--model", help="nominal element sizes or actual encodings"),
    published: bool = typer.Option(False, "--published", help="Append the published comparison rows"),
    g1_bytes: int = typer.Option(128, "--g1-bytes", help="Bytes per G1-class element (nominal model)"),
    g2_bytes: int = typer.Option(128, "--g2-bytes", help="Bytes per G2-class element (nominal model)"),
    zq_bytes: int = typer.Option(20, "--zq-bytes", help="Bytes per scalar (nominal model)"),
) -> None:
    """Per-component element counts and byte sizes."""
    with _handle_errors():
        try:
            size_model = SizeModel(mode=model, g1_bytes=g1_bytes, g2_bytes=g2_bytes, zq_bytes=zq_bytes)
        except ValidationError as exc:
            raise BenchError(str(exc)) from exc
        _emit(ctx, measure_sizes(size_model, include_published=published))


@bench_app.command("ops")
def bench_ops(
    ctx: typer.Context,
    verify: bool = typer.Option(False, "--verify", help="Run each operation instrumented and compare"),
) -> None:
    """Expensive-operation counts per scheme operation."""
    with _handle_errors():
        report = ops_report(verify=verify, rng=_rng(ctx))
        _emit(ctx, report)
    if verify and not all(r.verified for r in report.rows):
        console.print("[red]Instrumented counts differ from the static table[/red]")
        raise typer.Exit(EXIT_CRYPTO)


def _parse_users(text: str) -> list[int]:
    try:
        users = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise typer.BadParameter(f"expected comma-separated integers, got {text!r}") from exc
    if not users or any(n < 1 for n in users):
        raise typer.BadParameter("user counts must be >= 1")
    return users


@bench_app.command("timing")
def bench_timing(
    ctx: typer.Context,
    users: str = typer.Option("1,10,100", "--users", help="Comma-separated user counts"),
    trials: int = typer.Option(3, "--trials", min=1, help="Trials per point (median reported)"),
    payload_size: int = typer.Option(1024, "--payload-size", min=0, help="DEM payload bytes for Query"),
    workers: int = typer.Option(1, "--workers", min=1, help="Processes for sweep points"),
) -> None:
    """Median Enc and Query wall time versus number of users."""
    sweep = _parse_users(users)
    with _handle_errors():
        report = run_timing(sweep, trials, _rng(ctx), payload_size=payload_size, workers=workers)
        _emit(ctx, report)


if __name__ == "__main__":
    app()
