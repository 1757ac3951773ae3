"""
Speed Law Service - wave speeds a^2(u, v), characteristic coordinates and constraint data

Covers the three explicit speed families, the general family parametrized by
functions A, B, C of the characteristic label, and user-supplied custom speeds.
ConstraintData holds the first-order constraint f_v - lam*f_u = g(u, v, f)
whose compatibility conditions select those speeds.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from ..core.config import settings
from ..core.errors import DomainError, InvalidParameter, NoBracket, NoConvergence, SingularPoint
from .calculus import fd_derivative, find_root, scan_bracket
from .exprlang import FuncExpr, parse_expr

logger = logging.getLogger(__name__)

Bivariate = Callable[[float, float], float]


class SpeedKind(str, Enum):
    """Speed law family"""

    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    GENERAL = "general"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SpeedLaw:
    """
    Wave speed a^2(u, v) with its case parameters

    Use the ``case1``/``case2``/``case3``/``general_abc``/``custom*``
    constructors rather than building instances directly.
    """

    kind: SpeedKind
    c0: float = 0.0
    v0: float = 0.0
    k0: float = 0.0
    k1: float = 0.0
    A: Optional[FuncExpr] = None
    B: Optional[FuncExpr] = None
    C: Optional[FuncExpr] = None
    evaluator: Optional[Bivariate] = field(default=None, compare=False)
    depends_on: Optional[str] = None  # "u" | "v" | None
    source: str = ""

    @property
    def v1(self) -> float:
        return self.v0 - self.c0

    def label(self) -> str:
        if self.kind == SpeedKind.CASE1:
            return f"case1(c0={self.c0!r}, v0={self.v0!r}, v1={self.v1!r})"
        if self.kind == SpeedKind.CASE2:
            return f"case2(k0={self.k0!r})"
        if self.kind == SpeedKind.CASE3:
            return f"case3(k1={self.k1!r})"
        if self.kind == SpeedKind.GENERAL:
            return f"general(A={self.A}, B={self.B}, C={self.C})"
        return f"custom({self.source or 'evaluator'})"


def case1(c0: Optional[float] = None, v0: float = 0.0, v1: Optional[float] = None) -> SpeedLaw:
    """Case 1 speed; give c0 or v1 (v1 = v0 - c0)"""
    if c0 is None and v1 is None:
        raise InvalidParameter("case1 needs c0 or v1")
    if c0 is None:
        c0 = v0 - v1
    elif v1 is not None and not math.isclose(v1, v0 - c0):
        raise InvalidParameter("inconsistent case1 parameters", context={"c0": c0, "v0": v0, "v1": v1})
    if c0 == 0.0:
        raise InvalidParameter("case1 requires v0 != v1 (c0 != 0)", context={"v0": v0})
    return SpeedLaw(SpeedKind.CASE1, c0=float(c0), v0=float(v0))


def case2(k0: float) -> SpeedLaw:
    if k0 == 0.0:
        raise InvalidParameter("case2 requires k0 != 0")
    return SpeedLaw(SpeedKind.CASE2, k0=float(k0))


def case3(k1: float) -> SpeedLaw:
    if k1 == 0.0:
        raise InvalidParameter("case3 requires k1 != 0")
    return SpeedLaw(SpeedKind.CASE3, k1=float(k1))


def general_abc(A: FuncExpr, B: FuncExpr, C: Optional[FuncExpr] = None) -> SpeedLaw:
    return SpeedLaw(SpeedKind.GENERAL, A=A, B=B, C=C or parse_expr("0"))


def custom(a2: Bivariate, depends_on: Optional[str] = None, source: str = "") -> SpeedLaw:
    """Custom a^2 evaluator; ``depends_on`` marks a one-variable speed"""
    if depends_on not in (None, "u", "v"):
        raise InvalidParameter("depends_on must be 'u', 'v' or None", context={"depends_on": depends_on})
    return SpeedLaw(SpeedKind.CUSTOM, evaluator=a2, depends_on=depends_on, source=source)


def custom_v(expr: FuncExpr) -> SpeedLaw:
    """a^2 = expr(v)"""
    return custom(lambda u, v: expr(v), depends_on="v", source=f"v:{expr}")


def custom_u(expr: FuncExpr) -> SpeedLaw:
    """a^2 = expr(u)"""
    return custom(lambda u, v: expr(u), depends_on="u", source=f"u:{expr}")


def constant(a2: float) -> SpeedLaw:
    if a2 <= 0.0:
        raise InvalidParameter("constant speed must be positive", context={"a2": a2})
    return custom(lambda u, v: a2, depends_on="v", source=f"const:{a2!r}")


# ---------------------------------------------------------------------------
# Speeds and characteristic coordinates
# ---------------------------------------------------------------------------


def _case1_factors(s: SpeedLaw, v: float) -> Tuple[float, float]:
    P = v + s.v0
    Q = v + s.v1
    if P == 0.0 or Q == 0.0:
        raise SingularPoint("case1 singular manifold", context={"v": v, "v0": s.v0, "v1": s.v1})
    return P, Q


def _abc_denominator(s: SpeedLaw, u: float, v: float) -> Tuple[float, float]:
    eta = solve_eta_general(s.A, s.B, u, v)
    denominator = s.A(eta) * v + s.B(eta)
    if denominator == 0.0:
        raise SingularPoint("A(eta)*v + B(eta) vanishes", context={"u": u, "v": v})
    return eta, denominator


def eval_speed(s: SpeedLaw, u: float, v: float) -> float:
    """
    Evaluate a^2(u, v)

    Raises:
        SingularPoint: on the singular manifold of the case (or where a^2 degenerates)
        DomainError: custom evaluator returned a non-positive value
    """
    if s.kind == SpeedKind.CASE1:
        P, Q = _case1_factors(s, v)
        a2 = s.c0**2 * u**2 / (P**2 * Q**2)
    elif s.kind == SpeedKind.CASE2:
        if v == 0.0:
            raise SingularPoint("case2 singular at v = 0")
        a2 = s.k0**2 / v**4
    elif s.kind == SpeedKind.CASE3:
        if u == 0.0:
            raise SingularPoint("case3 singular at u = 0")
        a2 = s.k1**4 * u**4
    elif s.kind == SpeedKind.GENERAL:
        _, denominator = _abc_denominator(s, u, v)
        a2 = 1.0 / denominator**4
    else:
        a2 = float(s.evaluator(u, v))
        if not a2 > 0.0:
            raise DomainError("non-positive wave speed", context={"u": u, "v": v, "a2": a2})
        return a2

    if not a2 > 0.0:
        raise SingularPoint("degenerate wave speed", context={"u": u, "v": v})
    return a2


def eval_eta_sigma(s: SpeedLaw, u: float, v: float) -> Tuple[float, float]:
    """
    Characteristic coordinates (eta, sigma)

    Raises:
        SingularPoint: as eval_speed
        InvalidParameter: no closed-form coordinates (general and custom speeds)
    """
    if s.kind == SpeedKind.CASE1:
        P, Q = _case1_factors(s, v)
        return u * P / Q, u * Q / P
    if s.kind == SpeedKind.CASE2:
        if v == 0.0:
            raise SingularPoint("case2 singular at v = 0")
        return u + s.k0 / v, u - s.k0 / v
    if s.kind == SpeedKind.CASE3:
        if u == 0.0:
            raise SingularPoint("case3 singular at u = 0")
        shift = 1.0 / (s.k1**2 * u)
        return v + shift, v - shift
    raise InvalidParameter(f"no closed-form characteristic coordinates for {s.kind.value} speeds")


def solve_eta_general(A: FuncExpr, B: FuncExpr, u: float, v: float) -> float:
    """
    Solve eta = u - v / (B(eta) * (A(eta) * v + B(eta))) for eta

    The root is bracketed by scanning outward from eta = u (radius
    ETA_SCAN_FACTOR * (1 + |u|)) and refined by Brent's method.

    Raises:
        NoBracket: no sign change within the scan radius
        SingularPoint: root sits on a vanishing denominator
    """
    if v == 0.0:
        return float(u)

    def denominator(eta: float) -> float:
        return B(eta) * (A(eta) * v + B(eta))

    def residual(eta: float) -> float:
        d = denominator(eta)
        if d == 0.0:
            raise DomainError("vanishing denominator")
        return eta - u + v / d

    radius = settings.ETA_SCAN_FACTOR * (1.0 + abs(u))
    try:
        lo, hi = scan_bracket(residual, u, radius)
    except NoBracket:
        raise NoBracket("no characteristic label found", context={"u": u, "v": v, "radius": radius})
    eta = find_root(residual, lo, hi, max_iter=settings.ETA_MAX_BISECTIONS)

    try:
        r = residual(eta)
    except DomainError:
        raise SingularPoint("characteristic label on a vanishing denominator", context={"u": u, "v": v})
    if abs(r) > 1e-12 * (1.0 + abs(u)):
        if abs(denominator(eta)) < 1e-8:
            raise SingularPoint("characteristic label on a vanishing denominator", context={"u": u, "v": v})
        # bracket closed before the residual did; one Newton correction
        slope = fd_derivative(residual, eta, step=1e-7 * (1.0 + abs(eta)), order=4)
        eta = eta - r / slope
        if abs(residual(eta)) > 1e-12 * (1.0 + abs(u)):
            raise NoConvergence("characteristic label residual too large", context={"u": u, "v": v, "residual": r})
    logger.debug(f"eta({u}, {v}) = {eta}")
    return float(eta)


# ---------------------------------------------------------------------------
# Constraint data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintData:
    """
    First-order constraint f_v - lam * f_u = g(u, v, f)

    g = g_f(u, v) * f + sqrt(|lam|) * C(eta), where eta labels the
    characteristics of d/dv + lam * d/du.
    """

    speed: SpeedLaw
    lam: Bivariate = field(compare=False)
    g_f: Bivariate = field(compare=False)
    eta: Optional[Bivariate] = field(default=None, compare=False)
    C: Optional[FuncExpr] = None
    sign: int = 1

    def lam_at(self, u: float, v: float, f: float) -> float:
        return self.sign * self.lam(u, v)

    def g(self, u: float, v: float, f: float) -> float:
        base = self.g_f(u, v) * f
        if self.C is None or self.eta is None:
            return base
        return base + math.sqrt(abs(self.lam(u, v))) * self.C(self.eta(u, v))

    def perturbed(self, delta: float) -> "ConstraintData":
        """Same data with lam shifted by ``delta`` (negative controls)"""
        lam = self.lam
        return replace(self, lam=lambda u, v: lam(u, v) + delta)


def derive_constraint(s: SpeedLaw, C: Optional[FuncExpr] = None) -> ConstraintData:
    """
    Constraint data (lam = +a, g) solving the compatibility conditions for ``s``

    Custom speeds get g_f from the second compatibility condition by finite
    differences; whether the third one holds is then for constraint_residuals
    to report.
    """
    if s.kind == SpeedKind.CASE1:

        def lam(u, v):
            P, Q = _case1_factors(s, v)
            return s.c0 * u / (P * Q)

        def eta(u, v):
            return eval_eta_sigma(s, u, v)[0]

        return ConstraintData(s, lam, lambda u, v: 1.0 / _case1_factors(s, v)[0], eta, C)

    if s.kind == SpeedKind.CASE2:
        k = abs(s.k0)

        def lam(u, v):
            if v == 0.0:
                raise SingularPoint("case2 singular at v = 0")
            return k / v**2

        return ConstraintData(s, lam, lambda u, v: 1.0 / v, lambda u, v: u + k / v, C)

    if s.kind == SpeedKind.CASE3:
        k2 = s.k1**2

        def eta(u, v):
            return eval_eta_sigma(s, u, v)[0]

        return ConstraintData(s, lambda u, v: k2 * u * u, lambda u, v: -k2 * u, eta, C)

    if s.kind == SpeedKind.GENERAL:

        def lam(u, v):
            _, d = _abc_denominator(s, u, v)
            return 1.0 / d**2

        def g_f(u, v):
            eta, d = _abc_denominator(s, u, v)
            return s.A(eta) / d

        return ConstraintData(
            s, lam, g_f, lambda u, v: solve_eta_general(s.A, s.B, u, v), C if C is not None else s.C
        )

    if C is not None:
        raise InvalidParameter("custom speeds carry no characteristic label for C(eta)")

    def lam(u, v):
        return math.sqrt(eval_speed(s, u, v))

    def g_f(u, v):
        lam_v = fd_derivative(lambda r: lam(u, r), v)
        lam_u = fd_derivative(lambda r: lam(r, v), u)
        return -(lam_v + lam(u, v) * lam_u) / (2.0 * lam(u, v))

    return ConstraintData(s, lam, g_f)


def dalembert_constraint(lam: float = 1.0) -> ConstraintData:
    """Constant lam with g = 0 (constant-coefficient wave equation)"""
    return ConstraintData(constant(lam * lam), lambda u, v: lam, lambda u, v: 0.0)


def constraint_residuals(
    s: SpeedLaw,
    cd: ConstraintData,
    points: Iterable[Tuple[float, float, float]],
    step: Optional[float] = None,
) -> Tuple[float, float, float]:
    """
    Max-norm residuals of the compatibility system

        r1 = lam_f
        r2 = lam_v + lam*lam_u + 2*lam*g_f
        r3 = g_v + lam*g_u + g*g_f

    Derivatives by 4th-order central differences over sample points (u, v, f).
    """
    r1 = r2 = r3 = 0.0
    count = 0
    for u, v, f in points:
        eval_speed(s, u, v)  # admissibility
        lam = cd.lam_at(u, v, f)
        lam_f = fd_derivative(lambda r: cd.lam_at(u, v, r), f, step=step)
        lam_u = fd_derivative(lambda r: cd.lam_at(r, v, f), u, step=step)
        lam_v = fd_derivative(lambda r: cd.lam_at(u, r, f), v, step=step)
        g = cd.g(u, v, f)
        g_f = fd_derivative(lambda r: cd.g(u, v, r), f, step=step)
        g_u = fd_derivative(lambda r: cd.g(r, v, f), u, step=step)
        g_v = fd_derivative(lambda r: cd.g(u, r, f), v, step=step)

        r1 = max(r1, abs(lam_f))
        r2 = max(r2, abs(lam_v + lam * lam_u + 2.0 * lam * g_f))
        r3 = max(r3, abs(g_v + lam * g_u + g * g_f))
        count += 1

    logger.debug(f"Constraint residuals over {count} sample points: {r1:.3e}, {r2:.3e}, {r3:.3e}")
    return r1, r2, r3


def semilinear_residual(s: SpeedLaw, cd: ConstraintData, density, points: Iterable[Tuple[float, float]]) -> float:
    """Max-norm of f_v - lam*f_u - g(u, v, f) for a density along sample points (u, v)"""
    worst = 0.0
    for u, v in points:
        eval_speed(s, u, v)
        jet = density.jet(u, v)
        r = jet.P - cd.lam_at(u, v, jet.f) * jet.Q - cd.g(u, v, jet.f)
        worst = max(worst, abs(r))
    return worst


def sample_grid(u_range: Tuple[float, float], v_range: Tuple[float, float], n: int, f_values=(-1.0, 0.5, 2.0)):
    """(u, v, f) sample points on an n x n rectangle grid"""
    us = np.linspace(u_range[0], u_range[1], n)
    vs = np.linspace(v_range[0], v_range[1], n)
    return [(float(u), float(v), float(f)) for u in us for v in vs for f in f_values]
