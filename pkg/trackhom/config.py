from __future__ import annotations

import os
from pathlib import Path
from typing import Dict, Optional

from trackhom.services.config_service import ConfigService


def _default_base_dir() -> Path:
    return Path(__file__).resolve().parents[1]


BASE_DIR = Path(os.getenv("TRACKHOM_ROOT", _default_base_dir()))
FIXTURES_DIR = Path(os.getenv("TRACKHOM_FIXTURES_DIR", BASE_DIR / "fixtures"))
LOCAL_ENV_PATH = Path(os.getenv("LOCAL_ENV_PATH", BASE_DIR / ".env.local"))

DEFAULT_MAX_GENERATORS = 1_000_000
DEFAULT_MAX_DEGREE = 2
DEFAULT_LOG_LEVEL = "WARNING"

DEFAULT_ENV_TEMPLATE: Dict[str, str] = {
    "TRACKHOM_CACHE_DIR": "",
    "TRACKHOM_MAX_GENERATORS": str(DEFAULT_MAX_GENERATORS),
    "TRACKHOM_MAX_DEGREE": str(DEFAULT_MAX_DEGREE),
    "TRACKHOM_LOG_LEVEL": DEFAULT_LOG_LEVEL,
}

_config_service = ConfigService(LOCAL_ENV_PATH, DEFAULT_ENV_TEMPLATE)


def get_config_service() -> ConfigService:
    return _config_service


def _env_int(key: str, default: int) -> int:
    value = os.getenv(key)
    if value:
        try:
            return int(value)
        except ValueError:
            pass
    return _config_service.get_int(key, default)


def get_cache_dir() -> Optional[Path]:
    value = os.getenv("TRACKHOM_CACHE_DIR") or _config_service.get("TRACKHOM_CACHE_DIR")
    return Path(value) if value else None


def get_max_generators() -> int:
    return _env_int("TRACKHOM_MAX_GENERATORS", DEFAULT_MAX_GENERATORS)


def get_max_degree() -> int:
    return _env_int("TRACKHOM_MAX_DEGREE", DEFAULT_MAX_DEGREE)


def get_log_level() -> str:
    stored = _config_service.get("TRACKHOM_LOG_LEVEL")
    return os.getenv("TRACKHOM_LOG_LEVEL", stored or DEFAULT_LOG_LEVEL).upper()
