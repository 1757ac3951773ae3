"""
Solutions Service - exact solutions f(u, v) of f_vv - a^2(u, v) f_uu = 0

Builds the two-function families of the three explicit speed cases, the
separable product family, the trivial kernel and the recursive tower of
separable densities. Closed-form families are differentiated by the exact
chain rule through Jet2; families involving integrated factors are flagged
``numeric`` so callers pick the looser tolerance.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from ..core.config import settings
from ..core.errors import DomainError, InvalidParameter
from .calculus import chained_integrate, fd_partial, ode_integrate
from .density import Density, Jet2
from .exprlang import FuncExpr
from .speedlaw import SpeedKind, SpeedLaw, case1, case2, case3, eval_speed

logger = logging.getLogger(__name__)


def family_case1(c0: float, v0: float, theta1: FuncExpr, theta2: FuncExpr) -> Density:
    """
    f = sqrt(u (v + v0)(v + v1)) * (theta1(eta) + theta2(sigma))

    with v1 = v0 - c0, eta = u (v + v0)/(v + v1), sigma = u (v + v1)/(v + v0).
    Raises DomainError (SingularPoint) outside the positivity region.
    """
    speed = case1(c0=c0, v0=v0)
    v1 = speed.v1

    def evaluate(u: float, v: float) -> Jet2:
        U, V = Jet2.var_u(u), Jet2.var_v(v)
        P, Q = V + v0, V + v1
        eta = U * P / Q
        sigma = U * Q / P
        prefactor = (U * P * Q).sqrt()
        return prefactor * (eta.compose(theta1) + sigma.compose(theta2))

    return Density(evaluate, "case1", {"c0": c0, "v0": v0, "v1": v1, "theta1": theta1, "theta2": theta2})


def family_case2(k0: float, theta1: FuncExpr, theta2: FuncExpr) -> Density:
    """f = v * (theta1(u + k0/v) + theta2(u - k0/v))"""
    case2(k0)

    def evaluate(u: float, v: float) -> Jet2:
        U, V = Jet2.var_u(u), Jet2.var_v(v)
        shift = k0 / V
        return V * ((U + shift).compose(theta1) + (U - shift).compose(theta2))

    return Density(evaluate, "case2", {"k0": k0, "theta1": theta1, "theta2": theta2})


def family_case3(k1: float, theta1: FuncExpr, theta2: FuncExpr) -> Density:
    """f = u * (theta1(v + 1/(k1^2 u)) + theta2(v - 1/(k1^2 u)))"""
    case3(k1)

    def evaluate(u: float, v: float) -> Jet2:
        U, V = Jet2.var_u(u), Jet2.var_v(v)
        shift = 1.0 / (k1 * k1 * U)
        return U * ((V + shift).compose(theta1) + (V - shift).compose(theta2))

    return Density(evaluate, "case3", {"k1": k1, "theta1": theta1, "theta2": theta2})


def trivial_density(c1: float = 0.0, c2: float = 0.0, c3: float = 0.0, c4: float = 0.0) -> Density:
    """h = c1 u + c2 v + c3 uv + c4; commutes with every density"""

    def evaluate(u: float, v: float) -> Jet2:
        return Jet2(c1 * u + c2 * v + c3 * u * v + c4, P=c2 + c3 * u, Q=c1 + c3 * v, W=c3)

    return Density(evaluate, "trivial", {"c1": c1, "c2": c2, "c3": c3, "c4": c4})


def _closed_form_factor(mu: float, c1: float, c2: float) -> Callable[[float], Tuple[float, float, float]]:
    """F with F'' = mu F: c1 e^{ku} + c2 e^{-ku} (mu > 0) or c1 cos(ku) + c2 sin(ku) (mu < 0)"""
    k = math.sqrt(abs(mu))

    if mu > 0:

        def factor(x: float):
            ep, em = math.exp(k * x), math.exp(-k * x)
            value = c1 * ep + c2 * em
            return value, k * (c1 * ep - c2 * em), mu * value

    else:

        def factor(x: float):
            c, s = math.cos(k * x), math.sin(k * x)
            value = c1 * c + c2 * s
            return value, k * (c2 * c - c1 * s), mu * value

    return factor


def family_separable(
    s: SpeedLaw,
    mu: float,
    g0: float = 1.0,
    dg0: float = 1.0,
    ref: float = 0.0,
    c1: float = 1.0,
    c2: float = 0.0,
) -> Density:
    """
    Product solution f = F * G for a speed depending on one variable

    For a = a(v): f = F(u) G(v), F'' = mu F in closed form and
    G'' = mu a^2(v) G integrated numerically from (ref, g0, dg0).
    For a = a(u) the roles swap: f = F(v) G(u), G'' = (mu / a^2(u)) G.

    Raises:
        InvalidParameter: mu == 0 or a speed depending on both variables
    """
    if mu == 0.0:
        raise InvalidParameter("separation constant must be non-zero")

    if s.kind == SpeedKind.CASE2 or (s.kind == SpeedKind.CUSTOM and s.depends_on == "v"):
        along = "v"
    elif s.kind == SpeedKind.CASE3 or (s.kind == SpeedKind.CUSTOM and s.depends_on == "u"):
        along = "u"
    else:
        raise InvalidParameter(f"separable family needs a one-variable speed, got {s.label()}")

    if along == "v":

        def weight(x: float) -> float:
            return mu * eval_speed(s, 1.0, x)

    else:

        def weight(x: float) -> float:
            return mu / eval_speed(s, x, 1.0)

    F = _closed_form_factor(mu, c1, c2)

    @lru_cache(maxsize=4096)
    def G(x: float) -> Tuple[float, float, float]:
        value, slope = ode_integrate(weight, (ref, g0, dg0), x)
        return value, slope, weight(x) * value

    def evaluate(u: float, v: float) -> Jet2:
        if along == "v":
            (F0, F1, F2), (G0, G1, G2) = F(u), G(v)
            return Jet2(F0 * G0, P=F0 * G1, Q=F1 * G0, S=F0 * G2, R=F2 * G0, W=F1 * G1)
        (F0, F1, F2), (G0, G1, G2) = F(v), G(u)
        return Jet2(F0 * G0, P=F1 * G0, Q=F0 * G1, S=F2 * G0, R=F0 * G2, W=F1 * G1)

    params = {"speed": s.label(), "mu": mu, "g0": g0, "dg0": dg0, "ref": ref, "c1": c1, "c2": c2}
    return Density(evaluate, "separable", params, numeric=True)


def _require_linear(expr: FuncExpr, points: Iterable[float], name: str) -> None:
    for x in points:
        if abs(expr.jet(x, 2)[2]) > 1e-12:
            raise InvalidParameter(f"{name} must be linear (zero second derivative)", context={"at": x})


def _inverse_weight(weight: FuncExpr, x: float) -> float:
    w = weight(x)
    if w == 0.0 or not math.isfinite(w):
        raise DomainError(f"tower weight {weight} is {w} at {x}", context={"at": x})
    return 1.0 / w


def _tower_factors(weight: FuncExpr, seed: FuncExpr, n: int, start: float, rtol: float, atol: float):
    """F_1..F_n with F_i'' = F_{i-1} / weight and zero data at ``start``"""

    def rhs(x: float, y: np.ndarray) -> List[float]:
        out = np.empty_like(y)
        scale = _inverse_weight(weight, x)
        previous = seed(x)
        for i in range(n):
            out[2 * i] = y[2 * i + 1]
            out[2 * i + 1] = previous * scale
            previous = y[2 * i]
        return out

    @lru_cache(maxsize=4096)
    def factors(x: float) -> Tuple[Tuple[float, float, float], ...]:
        """((F_0, F_0', F_0''), (F_1, F_1', F_1''), ...)"""
        y = chained_integrate(rhs, start, np.zeros(2 * n), x, rtol=rtol, atol=atol)
        s0, s1, _ = seed.jet(x, 2)
        scale = _inverse_weight(weight, x)
        out = [(s0, s1, 0.0)]
        previous = s0
        for i in range(n):
            out.append((float(y[2 * i]), float(y[2 * i + 1]), previous * scale))
            previous = float(y[2 * i])
        return tuple(out)

    return factors


def nutku_tower(
    alpha: FuncExpr,
    beta: FuncExpr,
    F0: FuncExpr,
    G0: FuncExpr,
    n: int,
    corner: Tuple[float, float] = (0.0, 0.0),
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> List[Density]:
    """
    Recursive tower of separable densities H_1..H_n

    F_i'' = F_{i-1} / alpha(u), G_i'' = G_{i-1} / beta(v) with F_i, F_i', G_i,
    G_i' vanishing at ``corner``; H_k = sum_{i=0..k} F_i(u) G_{k-i}(v).
    Every H_k satisfies beta * h_vv = alpha * h_uu.

    Raises:
        InvalidParameter: n < 1 or non-linear seeds
        DomainError: alpha or beta vanishes or is not finite at the corner
        IntegrationFailure: a weight vanishes along the integration path
    """
    if n < 1:
        raise InvalidParameter("tower depth must be at least 1", context={"n": n})
    u0, v0 = corner
    _inverse_weight(alpha, u0)
    _inverse_weight(beta, v0)
    _require_linear(F0, (u0, u0 + 1.0, u0 + 2.0), "F0")
    _require_linear(G0, (v0, v0 + 1.0, v0 + 2.0), "G0")
    rtol = settings.ODE_RTOL if rtol is None else rtol
    atol = settings.ODE_ATOL if atol is None else atol

    F = _tower_factors(alpha, F0, n, u0, rtol, atol)
    G = _tower_factors(beta, G0, n, v0, rtol, atol)

    def member(k: int) -> Density:
        def evaluate(u: float, v: float) -> Jet2:
            Fu, Gv = F(u), G(v)
            f = P = Q = S = R = W = 0.0
            for i in range(k + 1):
                (a0, a1, a2), (b0, b1, b2) = Fu[i], Gv[k - i]
                f += a0 * b0
                P += a0 * b1
                Q += a1 * b0
                S += a0 * b2
                R += a2 * b0
                W += a1 * b1
            return Jet2(f, P, Q, S, R, W)

        params = {"alpha": alpha, "beta": beta, "F0": F0, "G0": G0, "k": k, "corner": corner}
        return Density(evaluate, "tower", params, numeric=True)

    logger.info(f"Built tower of {n} separable densities (alpha={alpha}, beta={beta})")
    return [member(k) for k in range(1, n + 1)]


def wave_residual(density: Density, speed: SpeedLaw, points: Iterable[Tuple[float, float]]) -> float:
    """Max over points of |S - a^2 R| / (1 + |R| + |S|) from exact jets"""
    worst = 0.0
    for u, v in points:
        jet = density.jet(u, v)
        a2 = eval_speed(speed, u, v)
        worst = max(worst, abs(jet.S - a2 * jet.R) / (1.0 + abs(jet.R) + abs(jet.S)))
    return worst


def wave_residuals(density: Density, speed: SpeedLaw, points: Iterable[Tuple[float, float]]) -> List[float]:
    """Pointwise normalized wave residuals (for residual tables)"""
    out = []
    for u, v in points:
        jet = density.jet(u, v)
        a2 = eval_speed(speed, u, v)
        out.append(abs(jet.S - a2 * jet.R) / (1.0 + abs(jet.R) + abs(jet.S)))
    return out


def separability_residual(
    density: Density,
    alpha: FuncExpr,
    beta: FuncExpr,
    points: Iterable[Tuple[float, float]],
    step: float = 1e-2,
) -> float:
    """Max over points of |beta h_vv - alpha h_uu| / (1 + |beta h_vv| + |alpha h_uu|) by 4th-order FD"""
    worst = 0.0
    for u, v in points:
        h_vv = beta(v) * fd_partial(density.value, (u, v), "vv", step)
        h_uu = alpha(u) * fd_partial(density.value, (u, v), "uu", step)
        worst = max(worst, abs(h_vv - h_uu) / (1.0 + abs(h_vv) + abs(h_uu)))
    return worst
