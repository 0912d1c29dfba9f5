from __future__ import annotations

import json
import sqlite3
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable

from sphere_det.models import HessianCell


class ResultStore:
    def __init__(self, path: str = "sphere_det.db") -> None:
        self.path = Path(path)
        self._init_schema()

    @contextmanager
    def connect(self):
        conn = sqlite3.connect(self.path)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
            conn.commit()
        finally:
            conn.close()

    def _init_schema(self) -> None:
        with self.connect() as conn:
            conn.executescript(
                """
                CREATE TABLE IF NOT EXISTS hessian_cells (
                    n INTEGER NOT NULL,
                    k INTEGER NOT NULL,
                    value TEXT NOT NULL,
                    per_phi2 TEXT NOT NULL,
                    sign TEXT NOT NULL,
                    computed_at DATETIME DEFAULT CURRENT_TIMESTAMP,
                    PRIMARY KEY (n, k)
                );

                CREATE TABLE IF NOT EXISTS run_log (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    label TEXT NOT NULL,
                    status TEXT NOT NULL,
                    detail TEXT,
                    ran_at DATETIME DEFAULT CURRENT_TIMESTAMP
                );

                CREATE TABLE IF NOT EXISTS app_state (
                    key TEXT PRIMARY KEY,
                    value TEXT NOT NULL,
                    updated_at DATETIME DEFAULT CURRENT_TIMESTAMP
                );
                """
            )

    def upsert_cells(self, cells: Iterable[HessianCell]) -> None:
        with self.connect() as conn:
            conn.executemany(
                """
                INSERT INTO hessian_cells(n, k, value, per_phi2, sign, computed_at)
                VALUES (?, ?, ?, ?, ?, CURRENT_TIMESTAMP)
                ON CONFLICT(n, k) DO UPDATE SET
                    value=excluded.value,
                    per_phi2=excluded.per_phi2,
                    sign=excluded.sign,
                    computed_at=CURRENT_TIMESTAMP
                """,
                [
                    (
                        c.n,
                        c.k,
                        json.dumps(c.value.to_json()),
                        json.dumps(c.per_phi2.to_json()),
                        c.sign,
                    )
                    for c in cells
                ],
            )

    def fetch_cells(self, n_max: int | None = None, k_max: int | None = None) -> list[HessianCell]:
        query = "SELECT n, k, value, per_phi2, sign FROM hessian_cells WHERE 1 = 1"
        params: list[int] = []
        if n_max is not None:
            query += " AND n <= ?"
            params.append(n_max)
        if k_max is not None:
            query += " AND k <= ?"
            params.append(k_max)
        query += " ORDER BY n, k"
        with self.connect() as conn:
            rows = conn.execute(query, params).fetchall()
        return [
            HessianCell.from_json(
                {
                    "n": row["n"],
                    "k": row["k"],
                    "value": json.loads(row["value"]),
                    "per_phi2": json.loads(row["per_phi2"]),
                    "sign": row["sign"],
                }
            )
            for row in rows
        ]

    def cached_coords(self) -> set[tuple[int, int]]:
        with self.connect() as conn:
            rows = conn.execute("SELECT n, k FROM hessian_cells").fetchall()
        return {(row["n"], row["k"]) for row in rows}

    def log_run(self, label: str, status: str, detail: str = "") -> None:
        with self.connect() as conn:
            conn.execute(
                "INSERT INTO run_log(label, status, detail) VALUES (?, ?, ?)",
                (label, status, detail),
            )

    def fetch_run_log(self, limit: int = 500) -> list[sqlite3.Row]:
        with self.connect() as conn:
            return conn.execute(
                "SELECT id, label, status, detail, ran_at FROM run_log ORDER BY id LIMIT ?",
                (limit,),
            ).fetchall()

    def set_state(self, key: str, value: str) -> None:
        with self.connect() as conn:
            conn.execute(
                """
                INSERT INTO app_state(key, value, updated_at)
                VALUES (?, ?, CURRENT_TIMESTAMP)
                ON CONFLICT(key) DO UPDATE SET value=excluded.value, updated_at=CURRENT_TIMESTAMP
                """,
                (key, value),
            )

    def get_state(self, key: str, default: str = "") -> str:
        with self.connect() as conn:
            row = conn.execute("SELECT value FROM app_state WHERE key = ?", (key,)).fetchone()
        return row["value"] if row else default
