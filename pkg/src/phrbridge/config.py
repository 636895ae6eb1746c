"""Settings management for PHRBridge."""

from __future__ import annotations

import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from dotenv import find_dotenv, load_dotenv

from .models import CliConfig

load_dotenv(find_dotenv(usecwd=True))

CONFIG_KEYS = ("store_dir", "cache_dir", "seed", "window_s", "format", "nonce_capacity")


def _env_int(name: str) -> int | None:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc


def _env_path(name: str) -> Path | None:
    raw = os.getenv(name)
    return Path(raw) if raw else None


@dataclass
class Settings:
    """Environment-level defaults; CLI flags and config files override these."""

    # Paths
    store_dir: Path = field(default_factory=lambda: Path(os.getenv("PHRBRIDGE_STORE_DIR", "phrbridge-store")))
    cache_dir: Path | None = field(default_factory=lambda: _env_path("PHRBRIDGE_CACHE_DIR"))

    # Logging
    log_level: str = field(default_factory=lambda: os.getenv("PHRBRIDGE_LOG_LEVEL", "INFO"))

    # Reproducibility (CI convenience; --seed wins)
    seed: int | None = field(default_factory=lambda: _env_int("PHRBRIDGE_SEED"))

    # Protocol
    window_s: float = field(default_factory=lambda: float(os.getenv("PHRBRIDGE_WINDOW_S", "120")))
    nonce_capacity: int = field(default_factory=lambda: _env_int("PHRBRIDGE_NONCE_CAPACITY") or 2 ** 16)
    curve: str = field(default_factory=lambda: os.getenv("PHRBRIDGE_CURVE", "bls12_381"))

    # Output
    output_format: str = field(default_factory=lambda: os.getenv("PHRBRIDGE_FORMAT", "markdown"))

    def __post_init__(self) -> None:
        if self.cache_dir is None:
            self.cache_dir = self.store_dir / "cache"


def get_settings() -> Settings:
    """Get a settings instance built from the current environment."""
    return Settings()


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a TOML config file; keys may sit at top level or under ``[phrbridge]``."""
    with open(path, "rb") as f:
        data = tomllib.load(f)
    section = data.get("phrbridge", data)
    unknown = sorted(set(section) - set(CONFIG_KEYS))
    if unknown:
        raise ValueError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return dict(section)


def build_cli_config(
    settings: Settings,
    config_file: str | Path | None = None,
    **flags: Any,
) -> CliConfig:
    """Merge environment < config file < explicit flags into a validated CliConfig."""
    values: dict[str, Any] = {
        "store_dir": settings.store_dir,
        "cache_dir": settings.cache_dir,
        "seed": settings.seed,
        "window_s": settings.window_s,
        "format": settings.output_format,
        "nonce_capacity": settings.nonce_capacity,
    }
    derived_cache = settings.cache_dir == settings.store_dir / "cache"
    layers = [load_config_file(config_file) if config_file is not None else {}]
    layers.append({k: v for k, v in flags.items() if v is not None})
    for layer in layers:
        values.update(layer)
        if "cache_dir" in layer:
            derived_cache = False
    if derived_cache:
        values["cache_dir"] = Path(values["store_dir"]) / "cache"
    return CliConfig(
        store_dir=values["store_dir"],
        cache_dir=values["cache_dir"],
        seed=values["seed"],
        freshness_window_s=values["window_s"],
        output_format=values["format"],
        nonce_capacity=values["nonce_capacity"],
    )
