from __future__ import annotations

import sqlite3

from trackhom.services.cache_service import LEVELS_FORMAT, CacheService


def test_missing_level_is_a_miss(tmp_path):
    cache = CacheService(tmp_path / "cache")

    assert cache.load_level("abc", 1) is None
    assert cache.misses == 1
    assert cache.levels("unknown") == []


def test_save_and_load(tmp_path):
    cache = CacheService(tmp_path)
    rows = [[[0, "st"]], [[1, "ts"], [0, "ss"]]]
    cache.save_level("abc", 2, rows)

    assert cache.load_level("abc", 2) == rows
    assert cache.hits == 1
    assert cache.levels("abc") == [2]

    cache.save_level("abc", 2, rows[:1])
    assert cache.load_level("abc", 2) == rows[:1]


def test_rows_in_another_format_are_ignored(tmp_path):
    cache = CacheService(tmp_path)
    cache.save_level("abc", 1, [[[0, "st"]]])
    with sqlite3.connect(cache.db_path("abc")) as conn:
        conn.execute("UPDATE levels SET format = ? WHERE level = 1", ("trackhom.levels/0",))
        conn.commit()

    assert cache.load_level("abc", 1) is None
    assert cache.levels("abc") == []


def test_format_column_is_added_to_old_files(tmp_path):
    path = tmp_path / "old.sqlite"
    with sqlite3.connect(path) as conn:
        conn.execute("CREATE TABLE levels (level INTEGER PRIMARY KEY, payload TEXT NOT NULL)")
        conn.execute("INSERT INTO levels (level, payload) VALUES (1, '[]')")
        conn.commit()
    cache = CacheService(tmp_path)

    assert cache.load_level("old", 1) is None
    cache.save_level("old", 1, [])
    assert cache.load_level("old", 1) == []
    with sqlite3.connect(path) as conn:
        assert conn.execute("SELECT format FROM levels WHERE level = 1").fetchone()[0] == LEVELS_FORMAT
