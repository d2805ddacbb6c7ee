"""Configuration management for the laboratory."""

import json
import logging
import os
import sys
from pathlib import Path
from typing import Literal

from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from rts_lab.schemas.bccks import ErrorMode
from rts_lab.schemas.mixing import P_MAX
from rts_lab.schemas.optimizer import TotalMode

logger = logging.getLogger(__name__)

# Repository-level config/ directory; absent in installed wheels.
DEFAULT_CONFIG_DIR = Path(__file__).resolve().parents[2] / "config"

LOG_LEVELS: dict[str, int] = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class Settings(BaseSettings):
    """Process settings loaded from RTS_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="RTS_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    # Diagnostics level; diagnostics go to standard error only
    log: Literal["error", "info", "debug"] = Field(default="error")

    # Directory holding search.json and simulation.json
    config_dir: str | None = Field(default=None)

    @field_validator("log", mode="before")
    @classmethod
    def normalize_log(cls, value: object) -> object:
        """Accept RTS_LOG in any letter case."""
        return value.strip().lower() if isinstance(value, str) else value

    def resolved_config_dir(self) -> Path:
        """Directory to read JSON configuration from."""
        if self.config_dir:
            return Path(self.config_dir).expanduser().resolve()
        return DEFAULT_CONFIG_DIR


def _read_json(filepath: str | Path) -> dict:
    """Read a JSON object, returning {} when the file does not exist."""
    path = Path(filepath)
    if not path.exists():
        logger.debug("config file %s not found, using defaults", path)
        return {}
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"{path} must contain a JSON object")
    return data


def _file_values(settings_cls: type[BaseSettings], filepath: str | Path) -> dict:
    """File values for keys not already set through the environment."""
    prefix = settings_cls.model_config.get("env_prefix", "").upper()
    return {
        key: value
        for key, value in _read_json(filepath).items()
        if f"{prefix}{key.upper()}" not in os.environ
    }


class SearchConfig(BaseSettings):
    """Search ranges and error packaging for the parameter optimizer."""

    model_config = SettingsConfigDict(env_prefix="RTS_SEARCH_", extra="ignore")

    k_min: int = 1
    k_max: int = 100
    p_cap: float = P_MAX
    error_mode: ErrorMode = ErrorMode.SUM_FORM
    total_mode: TotalMode = TotalMode.TIMES_R
    bisection_tol: float = 1e-9

    @model_validator(mode="after")
    def check_ranges(self) -> "SearchConfig":
        """k_min >= 1, k_max <= 500, room for k2 > k1, and a valid p cap."""
        if self.k_min < 1:
            raise ValueError("k_min must be at least 1")
        if self.k_max > 500:
            raise ValueError("k_max must not exceed 500")
        if self.k_max <= self.k_min:
            raise ValueError("k_max must exceed k_min")
        if not 0.0 <= self.p_cap <= P_MAX:
            raise ValueError(f"p_cap must lie in [0, {P_MAX!r}]")
        if self.bisection_tol <= 0.0:
            raise ValueError("bisection_tol must be positive")
        return self

    @classmethod
    def from_file(cls, filepath: str | Path | None = None) -> "SearchConfig":
        """
        Load search configuration from a JSON file.

        Args:
            filepath: Path to the configuration file (defaults to search.json
                in the configured directory); a missing file yields defaults

        Returns:
            SearchConfig instance
        """
        path = filepath or Settings().resolved_config_dir() / "search.json"
        return cls(**_file_values(cls, path))


class SimulationConfig(BaseSettings):
    """Defaults for dense simulations and grid scans."""

    model_config = SettingsConfigDict(env_prefix="RTS_SIM_", extra="ignore")

    shots: int = Field(default=20000, ge=1)
    seed: int = Field(default=42, ge=0)
    grid_points: int = Field(default=4097, ge=101)
    max_qubits: int = Field(default=10, ge=1)
    max_dense_entries: int = Field(default=200000, ge=1)
    mixing_slack: float = Field(default=1e-10, ge=0.0)

    @classmethod
    def from_file(cls, filepath: str | Path | None = None) -> "SimulationConfig":
        """
        Load simulation configuration from a JSON file.

        Args:
            filepath: Path to the configuration file (defaults to simulation.json
                in the configured directory); a missing file yields defaults

        Returns:
            SimulationConfig instance
        """
        path = filepath or Settings().resolved_config_dir() / "simulation.json"
        return cls(**_file_values(cls, path))


_HANDLER_NAME = "rts-lab-stderr"


def configure_logging(level: str | None = None) -> None:
    """
    Route the package loggers to standard error at the requested level.

    Args:
        level: One of error/info/debug; defaults to the RTS_LOG setting
    """
    name = (level or Settings().log).lower()
    if name not in LOG_LEVELS:
        raise ValueError(f"unknown log level: {name}")
    package_logger = logging.getLogger("rts_lab")
    for handler in list(package_logger.handlers):
        if handler.get_name() == _HANDLER_NAME:
            package_logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger.addHandler(handler)
    package_logger.setLevel(LOG_LEVELS[name])


# Global settings instance
settings = Settings()

# Load configurations
search_config = SearchConfig.from_file()
simulation_config = SimulationConfig.from_file()
