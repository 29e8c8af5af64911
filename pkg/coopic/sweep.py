"""
Seeded channel sampling and an order-preserving worker map for sweeps.
"""
import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np
import tqdm

from .gauss_model import GaussParams

DB_MIN = -20.0
DB_MAX = 80.0

T = TypeVar("T")
R = TypeVar("R")


def sample_channels(count: int, seed: int, db_min: float = DB_MIN, db_max: float = DB_MAX) -> List[GaussParams]:
    """
    Random channels with every link SNR 20*log10|h| uniform in [db_min, db_max]
    dB (log-uniform magnitudes) and theta uniform on [0, 2*pi).

    The same (count, seed, range) always gives the same list.
    """
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    if not db_min <= db_max:
        raise ValueError(f"Empty dB range [{db_min}, {db_max}]")
    rng = np.random.default_rng(seed)
    db = rng.uniform(db_min, db_max, size=(count, 5))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=count)
    return [GaussParams.from_db(*row, theta=t) for row, t in zip(db.tolist(), theta.tolist())]


def ordered_map(fn: Callable[[T], R], items: Sequence[T], jobs: Optional[int] = 1, verbose: bool = False, desc: str = None) -> List[R]:
    """
    Apply fn to every item and return the results in input order.

    Parameters
    ----------
    fn: Callable
        A module-level function, so it can be sent to worker processes.

    jobs: int
        Worker processes; 1 runs in this process, None or 0 uses every core.

    verbose: bool
        Show a tqdm progress bar.
    """
    items = list(items)
    workers = jobs or os.cpu_count() or 1
    if workers < 0:
        raise ValueError(f"jobs must be non-negative, got {jobs}")
    with tqdm.tqdm(total=len(items), desc=desc, unit="case", disable=not verbose) as pbar:
        if workers == 1 or len(items) <= 1:
            out = []
            for item in items:
                out.append(fn(item))
                pbar.update(1)
            return out
        chunksize = max(1, len(items) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            out = []
            for result in executor.map(fn, items, chunksize=chunksize):
                out.append(result)
                pbar.update(1)
            return out


def log_spaced(lo_db: float, hi_db: float, count: int) -> np.ndarray:
    """Magnitudes whose dB values are evenly spaced over [lo_db, hi_db]."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    return 10.0 ** (np.linspace(lo_db, hi_db, count) / 20.0)

