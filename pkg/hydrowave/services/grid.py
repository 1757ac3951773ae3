"""
Grid Service - admissible rectangles and ordered parallel evaluation over them
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple, TypeVar

import numpy as np

from ..core.config import settings
from ..core.errors import InvalidParameter

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Rectangle:
    """Admissible rectangle in (u, v)"""

    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float

    def __post_init__(self):
        if not (self.u_lo < self.u_hi and self.v_lo < self.v_hi):
            raise InvalidParameter(
                "rectangle bounds must satisfy lo < hi",
                context={"u": (self.u_lo, self.u_hi), "v": (self.v_lo, self.v_hi)},
            )

    def contains(self, u: float, v: float) -> bool:
        return self.u_lo <= u <= self.u_hi and self.v_lo <= v <= self.v_hi

    def points(self, n: int) -> List[Tuple[float, float]]:
        """n x n tensor grid, u-major"""
        if n < 1:
            raise InvalidParameter("grid size must be positive", context={"n": n})
        us = np.linspace(self.u_lo, self.u_hi, n)
        vs = np.linspace(self.v_lo, self.v_hi, n)
        return [(float(u), float(v)) for u in us for v in vs]

    def random_points(self, count: int, seed: int = 0) -> List[Tuple[float, float]]:
        rng = np.random.default_rng(seed)
        us = rng.uniform(self.u_lo, self.u_hi, count)
        vs = rng.uniform(self.v_lo, self.v_hi, count)
        return list(zip(us.tolist(), vs.tolist()))

    def clip(self, u: float, v: float) -> Tuple[float, float]:
        return min(max(u, self.u_lo), self.u_hi), min(max(v, self.v_lo), self.v_hi)

    def as_text(self) -> str:
        return f"u={self.u_lo!r}:{self.u_hi!r},v={self.v_lo!r}:{self.v_hi!r}"


class GridEvaluator:
    """Maps a function over grid points, in parallel when THREADS > 1, keeping input order"""

    def __init__(self, threads: Optional[int] = None):
        self.threads = max(1, threads if threads is not None else settings.THREADS)

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        if self.threads == 1 or len(items) < 2:
            return [fn(item) for item in items]
        logger.debug(f"Evaluating {len(items)} points on {self.threads} threads")
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            return list(executor.map(fn, items))


def evaluate_grid(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    return GridEvaluator().map(fn, items)
