from __future__ import annotations

from pathlib import Path
from typing import Callable, Dict

import pytest

from trackhom.services.fixture_service import Fixture, parse_fixture
from trackhom.services.resolution import ResolutionCache

FIXTURES_DIR = Path(__file__).resolve().parents[1] / "fixtures"

_loaded: Dict[str, Fixture] = {}


def load_fixture(name: str) -> Fixture:
    """Parse a shipped fixture once per test session."""
    if name not in _loaded:
        _loaded[name] = parse_fixture(FIXTURES_DIR / f"{name}.json")
    return _loaded[name]


@pytest.fixture
def fixture() -> Callable[[str], Fixture]:
    return load_fixture


@pytest.fixture
def resolution() -> Callable[[str, int], ResolutionCache]:
    def build(name: str, max_level: int) -> ResolutionCache:
        return ResolutionCache(load_fixture(name).track, max_level)

    return build
