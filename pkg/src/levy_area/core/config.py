import logging
import os
from dataclasses import dataclass
from typing import Callable, Optional

from dotenv import load_dotenv

from .coupling_oracle import DEFAULT_CLAMP, DEFAULT_P_REF
from .errors import ConfigurationError
from .levy_algorithms import DEFAULT_MEMORY_CAP, SeriesKernelConfig

DEFAULT_DOTENV_PATH = "environment/.env"
# Keys are read as LEVY_AREA_<NAME>
ENV_PREFIX = "LEVY_AREA_"


@dataclass(frozen=True)
class Settings:
    seed: Optional[int] = None
    memory_cap: int = DEFAULT_MEMORY_CAP
    block_size: Optional[int] = None
    p_ref: int = DEFAULT_P_REF
    clamp: float = DEFAULT_CLAMP
    log_level: str = "WARNING"

    def kernel_config(self) -> SeriesKernelConfig:
        return SeriesKernelConfig(block_size=self.block_size, memory_cap=self.memory_cap)


def _read(name: str, parse: Callable, default):
    key = ENV_PREFIX + name
    raw = os.getenv(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return parse(raw.strip())
    except ValueError:
        raise ConfigurationError(f"Malformed value for {key}: '{raw}'") from None


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise ValueError(raw)
    return value


def _seed(raw: str) -> int:
    value = int(raw, 0)
    if value < 0 or value >= 2**64:
        raise ValueError(raw)
    return value


def _clamp(raw: str) -> float:
    value = float(raw)
    if not 0.0 <= value < 1.0:
        raise ValueError(raw)
    return value


def _log_level(raw: str) -> str:
    level = raw.upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ValueError(raw)
    return level


def load_settings(dotenv_path: str = DEFAULT_DOTENV_PATH) -> Settings:
    """
    Read the settings from the environment, after loading a .env file if present.

    Variables already set in the environment take precedence over the file.

    Args:
        dotenv_path (str): location of the .env file

    Returns:
        Settings: with defaults for every missing key
    """
    load_dotenv(dotenv_path=dotenv_path)

    return Settings(
        seed=_read("SEED", _seed, None),
        memory_cap=_read("MEMORY_CAP", _positive_int, DEFAULT_MEMORY_CAP),
        block_size=_read("BLOCK_SIZE", _positive_int, None),
        p_ref=_read("P_REF", _positive_int, DEFAULT_P_REF),
        clamp=_read("CLAMP", _clamp, DEFAULT_CLAMP),
        log_level=_read("LOG_LEVEL", _log_level, "WARNING"),
    )
