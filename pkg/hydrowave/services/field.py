"""
State Field - discrete (u, v) profiles over a uniform x-grid
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from ..core.errors import InvalidParameter, MaskedCells


class CellFlag(str, Enum):
    """Per-cell status"""

    OK = "ok"
    CATASTROPHE = "catastrophe"
    MASKED = "masked"


@dataclass(frozen=True)
class StateField:
    """
    u(x), v(x) at one time on the grid x_j = x0 + j*h

    Flags default to all ``ok``. Stencil-based operations raise GridTooSmall
    themselves, so a field may hold a single point.
    """

    x0: float
    h: float
    u: np.ndarray
    v: np.ndarray
    time: float = 0.0
    flags: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        v = np.array(self.v, dtype=float)
        if u.ndim != 1 or u.shape != v.shape or u.shape[0] == 0:
            raise InvalidParameter("u and v must be non-empty arrays of equal length")
        if not self.h > 0.0:
            raise InvalidParameter("grid spacing must be positive", context={"h": self.h})
        flags = self.flags
        if flags is None:
            flags = np.full(u.shape[0], CellFlag.OK.value, dtype=object)
        else:
            flags = np.asarray([CellFlag(f).value for f in flags], dtype=object)
            if flags.shape != u.shape:
                raise InvalidParameter("flags must match the field length")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "flags", flags)

    @classmethod
    def from_grid(cls, xs: Sequence[float], u, v, time: float = 0.0, flags=None) -> "StateField":
        xs = np.asarray(xs, dtype=float)
        if xs.shape[0] == 1:
            return cls(float(xs[0]), 1.0, u, v, time, flags)
        steps = np.diff(xs)
        h = float(steps.mean())
        if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
            raise InvalidParameter("x-grid must be uniform")
        return cls(float(xs[0]), h, u, v, time, flags)

    @classmethod
    def periodic(cls, x0: float, x1: float, n: int, u, v, time: float = 0.0) -> "StateField":
        """Periodic grid of n cells on [x0, x1); u, v may be arrays or callables of x"""
        h = (x1 - x0) / n
        xs = x0 + h * np.arange(n)
        u_values = u(xs) if callable(u) else u
        v_values = v(xs) if callable(v) else v
        return cls(x0, h, np.broadcast_to(u_values, xs.shape), np.broadcast_to(v_values, xs.shape), time)

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n)

    @property
    def ok(self) -> np.ndarray:
        return self.flags == CellFlag.OK.value

    def all_ok(self) -> bool:
        return bool(np.all(self.ok))

    def require_ok(self) -> None:
        if not self.all_ok():
            bad = int(np.count_nonzero(~self.ok))
            raise MaskedCells("field contains flagged cells", context={"flagged": bad, "cells": self.n})

    def with_state(self, u: np.ndarray, v: np.ndarray, time: float) -> "StateField":
        return replace(self, u=u, v=v, time=time)

    def window(self, lo: float, hi: float) -> np.ndarray:
        """Boolean mask of cells with lo <= x <= hi"""
        xs = self.xs
        return (xs >= lo) & (xs <= hi)
