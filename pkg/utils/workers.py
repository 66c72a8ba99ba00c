# =============================================================================
# 🧵 utils/workers.py
# Thread-Pool mit deterministischer Zusammenführung
# -----------------------------------------------------------------------------
# Ergebnisse werden per as_completed eingesammelt, aber immer in der
# Reihenfolge der Eingabe (aufsteigendes Im λ, aufsteigende Auflösung) gemerged.
# WEDGE_STOKES_THREADS begrenzt die Anzahl der Threads.
# =============================================================================

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "WEDGE_STOKES_THREADS"


def worker_count(requested: Optional[int] = None) -> int:
    """Anzahl Threads: angefragt, aber höchstens WEDGE_STOKES_THREADS."""
    default = min(4, os.cpu_count() or 1)
    cap_raw = os.getenv(ENV_THREADS)
    cap = default
    if cap_raw:
        try:
            cap = max(1, int(cap_raw))
        except ValueError:
            logger.warning(f"⚠️ {ENV_THREADS}={cap_raw!r} ist keine Zahl – nutze {default}")
    wanted = requested if requested is not None else cap
    return max(1, min(wanted, cap))


def map_ordered(func: Callable[[T], R], items: Sequence[T], max_workers: Optional[int] = None) -> List[R]:
    """Wie map(), parallel; Fehler des ersten fehlgeschlagenen Elements werden weitergereicht."""
    workers = worker_count(max_workers)
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]

    results: List[Optional[R]] = [None] * len(items)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(func, item): index for index, item in enumerate(items)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results  # type: ignore[return-value]


def chunk_slices(total: int, parts: int) -> List[slice]:
    """Zerlegt range(total) in höchstens `parts` zusammenhängende Blöcke."""
    parts = max(1, min(parts, total))
    bounds = [round(i * total / parts) for i in range(parts + 1)]
    return [slice(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]
