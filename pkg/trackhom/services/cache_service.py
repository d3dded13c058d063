from __future__ import annotations

import json
import logging
import sqlite3
from pathlib import Path
from typing import List, Optional

logger = logging.getLogger(__name__)

LEVELS_FORMAT = "trackhom.levels/1"

Rows = List[List[List]]


class CacheService:
    """Persistent resolution levels, one sqlite file per track-category hash."""

    def __init__(self, cache_dir: Path):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def db_path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.sqlite"

    def _connect(self, key: str) -> sqlite3.Connection:
        conn = sqlite3.connect(self.db_path(key))
        conn.execute(
            """
            CREATE TABLE IF NOT EXISTS levels (
                level INTEGER PRIMARY KEY,
                payload TEXT NOT NULL
            )
            """
        )
        self._ensure_column(conn, "levels", "format", "TEXT")
        return conn

    def _ensure_column(self, conn: sqlite3.Connection, table: str, column: str, col_type: str) -> None:
        columns = [row[1] for row in conn.execute(f"PRAGMA table_info({table})")]
        if column not in columns:
            conn.execute(f"ALTER TABLE {table} ADD COLUMN {column} {col_type}")

    def load_level(self, key: str, level: int) -> Optional[Rows]:
        with self._connect(key) as conn:
            row = conn.execute("SELECT format, payload FROM levels WHERE level = ?", (level,)).fetchone()
        if row is None or row[0] != LEVELS_FORMAT:
            self.misses += 1
            logger.info("cache miss: level %d of %s", level, key[:12])
            return None
        self.hits += 1
        logger.info("cache hit: level %d of %s", level, key[:12])
        return json.loads(row[1])

    def save_level(self, key: str, level: int, rows: Rows) -> None:
        payload = json.dumps(rows, separators=(",", ":"))
        with self._connect(key) as conn:
            conn.execute(
                "INSERT INTO levels (level, format, payload) VALUES (?, ?, ?) "
                "ON CONFLICT(level) DO UPDATE SET format = excluded.format, payload = excluded.payload",
                (level, LEVELS_FORMAT, payload),
            )
            conn.commit()
        logger.info("cached level %d of %s (%d generators)", level, key[:12], len(rows))

    def levels(self, key: str) -> List[int]:
        if not self.db_path(key).exists():
            return []
        with self._connect(key) as conn:
            return [row[0] for row in conn.execute("SELECT level FROM levels WHERE format = ? ORDER BY level", (LEVELS_FORMAT,))]
