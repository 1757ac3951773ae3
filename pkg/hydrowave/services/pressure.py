"""
Pressure Service - p-system pressure laws

The p-system v_t = u_x, u_t + p(v)_x = 0 is hyperbolic where p'(v) < 0 and
Hamiltonian with density h = u^2/2 - F(v), F' = p. Presets cover the pressure
compatible with the second speed case and the Von Karman law.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from ..core.errors import HyperbolicityLoss, InvalidParameter
from .calculus import quadrature
from .density import Density, Jet2
from .exprlang import FuncExpr, eval_array, parse_expr
from .speedlaw import SpeedLaw, case2, custom

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PSystem:
    """Pressure law p(v) with derived sound speed and Hamiltonian"""

    p: FuncExpr
    name: str = "expr"
    params: Dict[str, Any] = field(default_factory=dict, compare=False)

    def pressure(self, v: float) -> float:
        return self.p(v)

    def jet(self, v: float) -> Tuple[float, float, float]:
        """(p, p', p'') at v"""
        p0, p1, p2 = self.p.jet(v, 2)
        return p0, p1, p2

    def dp(self, v: float) -> float:
        return self.p.jet(v, 1)[1]

    def sound_speed2(self, v: float) -> float:
        """-p'(v); raises HyperbolicityLoss where it is not positive"""
        c2 = -self.dp(v)
        if not c2 > 0.0:
            raise HyperbolicityLoss("p'(v) >= 0", context={"v": v, "dp": -c2, "pressure": self.name})
        return c2

    def arrays(self, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """p(v) and p'(v) over an array"""
        return eval_array(self.p, v)

    def max_sound_speed(self, v: np.ndarray) -> float:
        """max sqrt(-p'(v)) over a field; raises HyperbolicityLoss if p' >= 0 anywhere"""
        _, dp = self.arrays(v)
        if np.any(dp >= 0.0):
            worst = int(np.argmax(dp))
            raise HyperbolicityLoss(
                "p'(v) >= 0 on the field", context={"v": float(v[worst]), "dp": float(dp[worst]), "pressure": self.name}
            )
        return float(np.sqrt(np.max(-dp)))

    def speed_law(self) -> SpeedLaw:
        """Wave speed a^2 = -p'(v) of the symmetry equation f_vv + p'(v) f_uu = 0"""
        if self.name == "case2":
            return case2(self.params["k0"])
        return custom(lambda u, v: self.sound_speed2(v), depends_on="v", source=f"-p'({self.p})")

    def potential(self, v: float, ref: float = 1.0) -> float:
        """F(v) = integral of p from ref to v"""
        return quadrature(self.pressure, ref, v)

    def hamiltonian(self, ref: float = 1.0) -> Density:
        """h = u^2/2 - F(v)"""

        def evaluate(u: float, v: float) -> Jet2:
            p0, p1, _ = self.jet(v)
            return Jet2(0.5 * u * u - self.potential(v, ref), P=-p0, Q=u, S=-p1, R=1.0)

        return Density(evaluate, "hamiltonian", {"pressure": self.name, **self.params}, numeric=True)


def case2_pressure(k0: float, p0: float = 0.0) -> PSystem:
    """p = k0^2/(3 v^3) + p0, so p'(v) = -k0^2/v^4"""
    if k0 == 0.0:
        raise InvalidParameter("case2 pressure requires k0 != 0")
    expr = parse_expr(f"{float(k0) ** 2!r}/(3*s^3) + {float(p0)!r}")
    return PSystem(expr, "case2", {"k0": float(k0), "p0": float(p0)})


def von_karman(k0: float, p0: float = 0.0) -> PSystem:
    """Von Karman law p = -k0^2/v + p0"""
    expr = parse_expr(f"-{float(k0) ** 2!r}/s + {float(p0)!r}")
    return PSystem(expr, "vonkarman", {"k0": float(k0), "p0": float(p0)})


def expression_pressure(src: str) -> PSystem:
    return PSystem(parse_expr(src), "expr", {"p": src})
