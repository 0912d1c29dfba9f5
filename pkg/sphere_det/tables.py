from __future__ import annotations

import logging

from sphere_det.db import ResultStore
from sphere_det.errors import TableError
from sphere_det.hessians import evaluate_cells, table_coords
from sphere_det.models import HessianCell

logger = logging.getLogger(__name__)


def refresh_table(store: ResultStore, n_max: int, k_max: int, workers: int | None = None) -> list[HessianCell]:
    """Compute the missing (n, k) cells, cache them, and return the full grid ordered by (n, k)."""
    coords = table_coords(n_max, k_max)
    cached = store.cached_coords()
    missing = [coord for coord in coords if coord not in cached]
    hits = len(coords) - len(missing)
    if hits:
        logger.info("reusing %d cached cells", hits)
        store.log_run(f"n<={n_max},k<={k_max}", "cached", f"{hits} cells")

    failed: list[tuple[int, int]] = []
    for (n, k), cell, error in evaluate_cells(missing, workers):
        label = f"n={n},k={k}"
        if error is not None:
            logger.info("cell %s failed: %s", label, error)
            store.log_run(label, "failed", str(error))
            failed.append((n, k))
            continue
        store.upsert_cells([cell])
        store.log_run(label, "ok", f"sign={cell.sign}")

    store.set_state("last_table", f"n_max={n_max},k_max={k_max}")
    if failed:
        raise TableError(failed, f"{len(failed)} of {len(coords)} cells failed")
    wanted = set(coords)
    return [cell for cell in store.fetch_cells(n_max, k_max) if (cell.n, cell.k) in wanted]
