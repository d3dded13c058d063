from __future__ import annotations

from pathlib import Path

from trackhom import config
from trackhom.services.config_service import ConfigService


def test_config_service_round_trip(tmp_path):
    service = ConfigService(tmp_path / ".env.local")
    assert service.load() == {}

    service.save({"TRACKHOM_MAX_DEGREE": "3"})
    service.save({"TRACKHOM_CACHE_DIR": "/tmp/levels"})

    assert service.load() == {"TRACKHOM_MAX_DEGREE": "3", "TRACKHOM_CACHE_DIR": "/tmp/levels"}
    assert service.get_int("TRACKHOM_MAX_DEGREE", 2) == 3
    assert service.get("MISSING") is None


def test_comments_and_bad_integers(tmp_path):
    path = tmp_path / ".env.local"
    path.write_text("# local settings\n\nTRACKHOM_MAX_DEGREE = two\nnot a setting\n", encoding="utf-8")
    service = ConfigService(path)

    assert service.load() == {"TRACKHOM_MAX_DEGREE": "two"}
    assert service.get_int("TRACKHOM_MAX_DEGREE", 2) == 2


def test_ensure_defaults_keeps_existing_values(tmp_path):
    service = ConfigService(tmp_path / ".env.local")
    service.save({"TRACKHOM_MAX_DEGREE": "1"})
    added = service.ensure_defaults(config.DEFAULT_ENV_TEMPLATE)

    assert "TRACKHOM_MAX_DEGREE" not in added
    assert service.get("TRACKHOM_MAX_DEGREE") == "1"
    assert service.get("TRACKHOM_LOG_LEVEL") == "WARNING"
    assert service.ensure_defaults(config.DEFAULT_ENV_TEMPLATE) == {}


def test_environment_wins_over_local_file(tmp_path, monkeypatch):
    service = ConfigService(tmp_path / ".env.local")
    service.save({"TRACKHOM_MAX_DEGREE": "1", "TRACKHOM_CACHE_DIR": str(tmp_path / "from-file")})
    monkeypatch.setattr(config, "_config_service", service)
    monkeypatch.delenv("TRACKHOM_MAX_DEGREE", raising=False)
    monkeypatch.delenv("TRACKHOM_CACHE_DIR", raising=False)

    assert config.get_max_degree() == 1
    assert config.get_cache_dir() == tmp_path / "from-file"

    monkeypatch.setenv("TRACKHOM_MAX_DEGREE", "3")
    monkeypatch.setenv("TRACKHOM_CACHE_DIR", "/var/cache/trackhom")
    assert config.get_max_degree() == 3
    assert config.get_cache_dir() == Path("/var/cache/trackhom")


def test_defaults(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "_config_service", ConfigService(tmp_path / "absent"))
    for key in ("TRACKHOM_MAX_GENERATORS", "TRACKHOM_MAX_DEGREE", "TRACKHOM_LOG_LEVEL", "TRACKHOM_CACHE_DIR"):
        monkeypatch.delenv(key, raising=False)

    assert config.get_max_generators() == 1_000_000
    assert config.get_max_degree() == 2
    assert config.get_log_level() == "WARNING"
    assert config.get_cache_dir() is None


def test_only_trackhom_settings_are_loaded(tmp_path):
    path = tmp_path / ".env.local"
    path.write_text('export TRACKHOM_MAX_DEGREE="3"\nOPENAI_API_KEY=sk-none\nTRACKHOM_CACHE_DIR=\'/tmp/levels\'\n', encoding="utf-8")
    service = ConfigService(path, config.DEFAULT_ENV_TEMPLATE)

    settings = service.load()
    assert "OPENAI_API_KEY" not in settings
    assert settings["TRACKHOM_MAX_DEGREE"] == "3"
    assert settings["TRACKHOM_CACHE_DIR"] == "/tmp/levels"
    assert settings["TRACKHOM_LOG_LEVEL"] == "WARNING"
    assert service.get_int("TRACKHOM_MAX_GENERATORS", 0) == 1_000_000
    assert set(service.ensure_defaults(config.DEFAULT_ENV_TEMPLATE)) == {"TRACKHOM_MAX_GENERATORS", "TRACKHOM_LOG_LEVEL"}
