"""
Density Service - second-order jets of scalar fields h(u, v)

Jet2 carries a value with its first and second partials and composes by the
exact chain rule. Density wraps a Jet2 evaluator with provenance so every
residual report can say which family and parameters produced it.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Union

import numpy as np

from ..core.errors import SingularPoint
from .calculus import fd_partial
from .exprlang import FuncExpr

logger = logging.getLogger(__name__)

Number = Union[int, float]


@dataclass(frozen=True)
class Jet2:
    """
    Value and partials of f(u, v)

    Attributes:
        f: value
        P: f_v
        Q: f_u
        S: f_vv
        R: f_uu
        W: f_uv
    """

    f: float
    P: float = 0.0
    Q: float = 0.0
    S: float = 0.0
    R: float = 0.0
    W: float = 0.0

    @classmethod
    def const(cls, c: float) -> "Jet2":
        return cls(float(c))

    @classmethod
    def var_u(cls, u: float) -> "Jet2":
        return cls(float(u), Q=1.0)

    @classmethod
    def var_v(cls, v: float) -> "Jet2":
        return cls(float(v), P=1.0)

    def apply(self, g0: float, g1: float, g2: float) -> "Jet2":
        """Jet of g(f) given g, g', g'' evaluated at f"""
        return Jet2(
            g0,
            g1 * self.P,
            g1 * self.Q,
            g2 * self.P * self.P + g1 * self.S,
            g2 * self.Q * self.Q + g1 * self.R,
            g2 * self.P * self.Q + g1 * self.W,
        )

    def compose(self, expr: FuncExpr) -> "Jet2":
        return self.apply(*expr.jet(self.f, 2))

    def reciprocal(self) -> "Jet2":
        if self.f == 0.0:
            raise SingularPoint("reciprocal of a vanishing jet")
        inv = 1.0 / self.f
        return self.apply(inv, -inv * inv, 2.0 * inv**3)

    def sqrt(self) -> "Jet2":
        if self.f <= 0.0:
            raise SingularPoint("square root of a non-positive jet", context={"value": self.f})
        root = float(np.sqrt(self.f))
        return self.apply(root, 0.5 / root, -0.25 / (root * self.f))

    def _lift(self, other: Union["Jet2", Number]) -> "Jet2":
        return other if isinstance(other, Jet2) else Jet2.const(other)

    def __add__(self, other):
        o = self._lift(other)
        return Jet2(self.f + o.f, self.P + o.P, self.Q + o.Q, self.S + o.S, self.R + o.R, self.W + o.W)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.f, -self.P, -self.Q, -self.S, -self.R, -self.W)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            c = float(other)
            return Jet2(c * self.f, c * self.P, c * self.Q, c * self.S, c * self.R, c * self.W)
        a, b = self, other
        return Jet2(
            a.f * b.f,
            a.P * b.f + a.f * b.P,
            a.Q * b.f + a.f * b.Q,
            a.S * b.f + 2.0 * a.P * b.P + a.f * b.S,
            a.R * b.f + 2.0 * a.Q * b.Q + a.f * b.R,
            a.W * b.f + a.Q * b.P + a.P * b.Q + a.f * b.W,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            if float(other) == 0.0:
                raise SingularPoint("division by zero")
            return self * (1.0 / float(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def as_dict(self) -> Dict[str, float]:
        return {"f": self.f, "f_v": self.P, "f_u": self.Q, "f_vv": self.S, "f_uu": self.R, "f_uv": self.W}


@dataclass(frozen=True)
class Density:
    """Scalar field with exact Jet2 evaluation and provenance"""

    evaluator: Callable[[float, float], Jet2]
    family: str
    params: Dict[str, Any] = field(default_factory=dict, compare=False)
    numeric: bool = False

    def jet(self, u: float, v: float) -> Jet2:
        return self.evaluator(float(u), float(v))

    def value(self, u: float, v: float) -> float:
        return self.jet(u, v).f

    def values(self, us: Iterable[float], vs: Iterable[float]) -> np.ndarray:
        return np.array([self.value(u, v) for u, v in zip(us, vs)])

    def __add__(self, other: "Density") -> "Density":
        return Density(
            lambda u, v: self.jet(u, v) + other.jet(u, v),
            family=f"{self.family}+{other.family}",
            params={"terms": [self.describe(), other.describe()]},
            numeric=self.numeric or other.numeric,
        )

    def scaled(self, c: float) -> "Density":
        return Density(lambda u, v: self.jet(u, v) * c, self.family, {**self.params, "scale": c}, self.numeric)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, **{k: str(v) if isinstance(v, FuncExpr) else v for k, v in self.params.items()}}


def density_of_u(expr: FuncExpr) -> Density:
    """Density depending on u only, h = e(u)"""
    return Density(lambda u, v: Jet2.var_u(u).compose(expr), "u", {"expr": expr})


def density_of_v(expr: FuncExpr) -> Density:
    """Density depending on v only, h = e(v)"""
    return Density(lambda u, v: Jet2.var_v(v).compose(expr), "v", {"expr": expr})


def jet_consistency(density: Density, u: float, v: float, step: float) -> float:
    """Largest mismatch between jet channels and 4th-order FD of the value channel"""
    jet = density.jet(u, v)
    mismatches = [
        jet.Q - fd_partial(density.value, (u, v), "u", step),
        jet.P - fd_partial(density.value, (u, v), "v", step),
        jet.R - fd_partial(density.value, (u, v), "uu", step),
        jet.S - fd_partial(density.value, (u, v), "vv", step),
        jet.W - fd_partial(density.value, (u, v), "uv", step),
    ]
    return float(np.max(np.abs(mismatches)))
