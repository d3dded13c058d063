from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Optional

logger = logging.getLogger(__name__)

SETTING_PREFIX = "TRACKHOM_"


class ConfigService:
    """KEY=VALUE settings file, the local override layer under the environment.

    Only ``TRACKHOM_*`` keys are settings; ``defaults`` fill whatever the file leaves out.
    """

    def __init__(self, env_path: Path, defaults: Optional[Dict[str, str]] = None):
        self.env_path = Path(env_path)
        self.defaults = dict(defaults or {})

    def load(self) -> Dict[str, str]:
        settings = dict(self.defaults)
        for key, value in self._read().items():
            if not key.startswith(SETTING_PREFIX):
                logger.debug("ignoring %s in %s: not a trackhom setting", key, self.env_path)
                continue
            settings[key] = value
        return settings

    def get(self, key: str) -> Optional[str]:
        value = self.load().get(key)
        return value or None

    def get_int(self, key: str, default: int) -> int:
        value = self.get(key)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            logger.warning("ignoring non-integer %s=%r in %s", key, value, self.env_path)
            return default

    def save(self, values: Dict[str, str]) -> None:
        current = self._read()
        current.update(values)
        self._write(current)

    def ensure_defaults(self, defaults: Dict[str, str]) -> Dict[str, str]:
        """Write the missing keys of ``defaults`` to the file; returns what was added."""
        current = self._read()
        missing = {key: value for key, value in defaults.items() if key not in current}
        if missing:
            current.update(missing)
            self._write(current)
        return missing

    def _read(self) -> Dict[str, str]:
        if not self.env_path.exists():
            return {}
        data: Dict[str, str] = {}
        for line in self.env_path.read_text(encoding="utf-8").splitlines():
            stripped = line.strip()
            if stripped.startswith("export "):
                stripped = stripped[len("export ") :].lstrip()
            if not stripped or stripped.startswith("#") or "=" not in stripped:
                continue
            key, value = stripped.split("=", 1)
            value = value.strip()
            if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
                value = value[1:-1]
            data[key.strip()] = value
        return data

    def _write(self, values: Dict[str, str]) -> None:
        lines = [f"{key}={value}" for key, value in values.items()]
        self.env_path.parent.mkdir(parents=True, exist_ok=True)
        self.env_path.write_text("\n".join(lines).rstrip() + "\n", encoding="utf-8")
