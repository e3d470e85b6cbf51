from __future__ import annotations

import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigurationError, LabIOError
from .logging_config import get_logger
from ..schemas.configs import RunConfig

logger = get_logger(__name__)


class Settings(BaseSettings):
    """Process configuration loaded from environment variables and .env file."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        populate_by_name=True,
    )

    app_name: str = Field(default="goat-lab", alias="GOAT_LAB_APP_NAME")
    output_root: Path = Field(default=Path("runs"), alias="GOAT_LAB_OUTPUT_ROOT")
    log_level: str = Field(default="INFO", alias="GOAT_LAB_LOG_LEVEL")
    log_format: str = Field(default="json", alias="GOAT_LAB_LOG_FORMAT")
    jobs: int = Field(default=1, ge=1, alias="GOAT_LAB_JOBS")


@lru_cache
def get_settings() -> Settings:
    """Return cached process settings."""
    return Settings()


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Merge `override` into a copy of `base`; nested mappings merge key by key."""
    merged: Dict[str, Any] = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def read_config_file(path: Path) -> Dict[str, Any]:
    """Read a TOML or JSON run configuration file into a plain dict."""
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise LabIOError(f"Cannot read config file {path}", payload={"error": str(exc)}) from exc

    try:
        if path.suffix == ".json":
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"Malformed config file {path}", payload={"error": str(exc)}) from exc

    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {path} must hold a table at top level")
    return data


def build_run_config(
    config_path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """
    Resolve a RunConfig with precedence defaults < config file < overrides.

    `overrides` uses the same nested section layout as the file, e.g.
    ``{"algorithm": {"seed": 3}, "weighting": {"uw_sharpness": 2.5}}``.
    """
    data: Dict[str, Any] = {}
    if config_path is not None:
        data = read_config_file(config_path)
    if overrides:
        data = deep_merge(data, overrides)

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(
            "Invalid run configuration",
            payload={"errors": json.loads(exc.json(include_url=False))},
        ) from exc

    logger.debug("Resolved run configuration", extra={"source": str(config_path) if config_path else None})
    return config


def validate_section(model: Any, data: Mapping[str, Any]) -> Any:
    """Validate one config section, converting pydantic errors into ConfigurationError."""
    try:
        return model.model_validate(dict(data))
    except ValidationError as exc:
        raise ConfigurationError(
            f"Invalid {model.__name__}",
            payload={"errors": json.loads(exc.json(include_url=False))},
        ) from exc
