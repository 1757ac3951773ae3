"""
Densities Catalog - named Hamiltonian densities with their associated speeds

Each entry builds an exact-jet Density from a parameter map. Entries record
the speed law under which the formula is published and the speed it actually
satisfies; validate_entry reports any mismatch rather than patching it.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from ..core.config import settings
from ..core.errors import DomainError, InvalidParameter, SingularPoint, UnknownName
from .density import Density, Jet2
from .grid import Rectangle
from .solutions import wave_residual
from .speedlaw import SpeedLaw, case1, case2, case3

logger = logging.getLogger(__name__)

Params = Mapping[str, float]


@dataclass(frozen=True)
class CatalogEntry:
    """Registered density formula"""

    name: str
    description: str
    defaults: Dict[str, float]
    build: Callable[[Dict[str, float]], Density]
    printed_speed: Callable[[Dict[str, float]], SpeedLaw]
    speed: Callable[[Dict[str, float]], SpeedLaw]
    domain: Rectangle


@dataclass(frozen=True)
class EntryValidation:
    """Outcome of checking an entry against its published and effective speeds"""

    name: str
    printed_speed: str
    printed_residual: float
    effective_speed: str
    effective_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.effective_residual <= self.tolerance

    @property
    def discrepancy(self) -> bool:
        return self.printed_residual > self.tolerance


def _case1_parameters(params: Dict[str, float]) -> Tuple[float, float, float]:
    """(c0, v0, v1) from c0/v0/v1 with v1 = v0 - c0"""
    v0 = params["v0"]
    if "v1" in params and "c0" not in params:
        v1 = params["v1"]
        c0 = v0 - v1
    else:
        c0 = params["c0"]
        v1 = params.get("v1", v0 - c0)
    if v0 == v1:
        raise InvalidParameter("v0 == v1 makes the density singular", context={"v0": v0, "v1": v1})
    if not math.isclose(v1, v0 - c0):
        raise InvalidParameter("inconsistent case1 parameters", context={"c0": c0, "v0": v0, "v1": v1})
    return c0, v0, v1


def _log_additive(params: Dict[str, float]) -> Density:
    """h = ln u + c0^2 (2v + v0 + v1)/(v1 - v0)^3 ln((v + v0)/(v + v1))"""
    c0, v0, v1 = _case1_parameters(params)
    coefficient = c0**2 / (v1 - v0) ** 3

    def evaluate(u: float, v: float) -> Jet2:
        U, V = Jet2.var_u(u), Jet2.var_v(v)
        ratio = (V + v0) / (V + v1)
        return U.apply(*_ln_jet(u)) + coefficient * (2.0 * V + v0 + v1) * ratio.apply(*_ln_jet(ratio.f))

    return Density(evaluate, "catalog:t1", {"c0": c0, "v0": v0, "v1": v1})


def _ln_jet(x: float) -> Tuple[float, float, float]:
    if x <= 0.0:
        raise DomainError("logarithm of a non-positive value", context={"argument": x})
    return math.log(x), 1.0 / x, -1.0 / (x * x)


def _pow_jet(x: float, m: float) -> Tuple[float, float, float]:
    if x <= 0.0:
        raise DomainError("power of a non-positive value", context={"argument": x})
    return x**m, m * x ** (m - 1.0), m * (m - 1.0) * x ** (m - 2.0)


def _quadratic(params: Dict[str, float]) -> Density:
    """h = u^2/2 + k0^2/(6 v^2)"""
    k0 = params["k0"]

    def evaluate(u: float, v: float) -> Jet2:
        return Jet2(0.5 * u * u + k0**2 / (6.0 * v**2), P=-(k0**2) / (3.0 * v**3), Q=u, S=k0**2 / v**4, R=1.0)

    return Density(evaluate, "catalog:t2", {"k0": k0})


def _product_case1(params: Dict[str, float]) -> Density:
    """
    H1(u) H2(v) with H1 = c1 u^m+ + c2 u^m-, m+- = (c0 +- sqrt(c0^2 + 4k))/(2 c0),
    H2 = sqrt((v+v0)(v+v1)) (c3 ((v+v1)/(v+v0))^k1 + c4 ((v+v0)/(v+v1))^k1),
    k1 = sqrt((v0 - v1)^2 + 4k)/(2 (v0 - v1)), k the separation constant
    """
    c0, v0, v1 = _case1_parameters(params)
    k = params["sep_k"]
    c1, c2, c3, c4 = params["c1"], params["c2"], params["c3"], params["c4"]
    disc_u = c0**2 + 4.0 * k
    disc_v = (v0 - v1) ** 2 + 4.0 * k
    if disc_u < 0.0 or disc_v < 0.0:
        raise InvalidParameter("separation constant gives complex exponents", context={"sep_k": k})
    m_plus = (c0 + math.sqrt(disc_u)) / (2.0 * c0)
    m_minus = (c0 - math.sqrt(disc_u)) / (2.0 * c0)
    k1 = math.sqrt(disc_v) / (2.0 * (v0 - v1))

    def evaluate(u: float, v: float) -> Jet2:
        U, V = Jet2.var_u(u), Jet2.var_v(v)
        H1 = c1 * U.apply(*_pow_jet(u, m_plus)) + c2 * U.apply(*_pow_jet(u, m_minus))
        P, Q = V + v0, V + v1
        prefactor = (P * Q).sqrt()
        ratio = Q / P
        inverse = P / Q
        H2 = prefactor * (c3 * ratio.apply(*_pow_jet(ratio.f, k1)) + c4 * inverse.apply(*_pow_jet(inverse.f, k1)))
        return H1 * H2

    return Density(
        evaluate,
        "catalog:product-case1",
        {"c0": c0, "v0": v0, "v1": v1, "sep_k": k, "m_plus": m_plus, "m_minus": m_minus, "k1": k1},
    )


def _product_case2(params: Dict[str, float]) -> Density:
    """
    k1 > 0: H1 = c1 u sinh(b/u) + c2 u cosh(b/u), b = 1/(k0 sqrt(k1)),
            H2 = c3 e^{v/sqrt(k1)} + c4 e^{-v/sqrt(k1)}
    k1 < 0: H1 = c1 u sin(b/u) + c2 u cos(b/u), b = 1/(k0^2 sqrt(-k1)),
            H2 = c3 sin(v/sqrt(-k1)) + c4 cos(v/sqrt(-k1))
    """
    k0, k1 = params["k0"], params["k1"]
    c1, c2, c3, c4 = params["c1"], params["c2"], params["c3"], params["c4"]
    if k0 == 0.0 or k1 == 0.0:
        raise InvalidParameter("product-case2 requires k0 != 0 and k1 != 0", context={"k0": k0, "k1": k1})
    hyperbolic = k1 > 0.0
    root = math.sqrt(abs(k1))
    b = 1.0 / (k0 * root) if hyperbolic else 1.0 / (k0**2 * root)

    def evaluate(u: float, v: float) -> Jet2:
        if u == 0.0:
            raise SingularPoint("product-case2 singular at u = 0")
        U, V = Jet2.var_u(u), Jet2.var_v(v)
        phase = b / U
        y = V * (1.0 / root)
        if hyperbolic:
            sh, ch = math.sinh(phase.f), math.cosh(phase.f)
            H1 = U * (c1 * phase.apply(sh, ch, sh) + c2 * phase.apply(ch, sh, ch))
            ep, em = math.exp(y.f), math.exp(-y.f)
            H2 = c3 * y.apply(ep, ep, ep) + c4 * y.apply(em, -em, em)
        else:
            sn, cs = math.sin(phase.f), math.cos(phase.f)
            H1 = U * (c1 * phase.apply(sn, cs, -sn) + c2 * phase.apply(cs, -sn, -cs))
            sy, cy = math.sin(y.f), math.cos(y.f)
            H2 = c3 * y.apply(sy, cy, -sy) + c4 * y.apply(cy, -sy, -cy)
        return H1 * H2

    return Density(evaluate, "catalog:product-case2", {"k0": k0, "k1": k1, "branch": "sinh" if hyperbolic else "sin"})


def _gas(params: Dict[str, float]) -> Density:
    """h = -u^2 v/2 - q(v), q'' = p'/v with the Von Karman law, so q = k0^2/(2v)"""
    k0 = params["k0"]

    def evaluate(u: float, v: float) -> Jet2:
        q0, q1, q2 = k0**2 / (2.0 * v), -(k0**2) / (2.0 * v**2), k0**2 / v**3
        return Jet2(-0.5 * u * u * v - q0, P=-0.5 * u * u - q1, Q=-u * v, S=-q2, R=-v, W=-u)

    return Density(evaluate, "catalog:o1-gas", {"k0": k0, "p0": params.get("p0", 0.0)})


def _elastic(params: Dict[str, float]) -> Density:
    """h = u^2/2 + s(v), s' = sigma = -k1^2/(3 v^3)"""
    k1 = params["k1"]

    def evaluate(u: float, v: float) -> Jet2:
        return Jet2(0.5 * u * u + k1**2 / (6.0 * v**2), P=-(k1**2) / (3.0 * v**3), Q=u, S=k1**2 / v**4, R=1.0)

    return Density(evaluate, "catalog:o2-elastic", {"k1": k1})


def _case1_speed(params: Dict[str, float]) -> SpeedLaw:
    c0, v0, _ = _case1_parameters(params)
    return case1(c0=c0, v0=v0)


def _product_case2_speed(params: Dict[str, float]) -> SpeedLaw:
    k0 = params["k0"]
    if params["k1"] > 0.0:
        return case3(math.sqrt(abs(k0)))
    return case3(abs(k0))


_UNIT = Rectangle(1.0, 2.0, 1.0, 2.0)
_PRODUCT = {"c1": 1.0, "c2": 1.0, "c3": 1.0, "c4": 1.0}

CATALOG: Dict[str, CatalogEntry] = {
    entry.name: entry
    for entry in (
        CatalogEntry(
            "t1", "additively separable density for the case1 speed",
            {"c0": 1.0, "v0": 1.0}, _log_additive, _case1_speed, _case1_speed, _UNIT,
        ),
        CatalogEntry(
            "t2", "additively separable density for the case2 speed",
            {"k0": 1.0}, _quadratic, lambda p: case2(p["k0"]), lambda p: case2(p["k0"]), _UNIT,
        ),
        CatalogEntry(
            "product-case1", "product density for the case1 speed",
            {"c0": 1.0, "v0": 1.0, "sep_k": 1.0, **_PRODUCT}, _product_case1, _case1_speed, _case1_speed, _UNIT,
        ),
        CatalogEntry(
            "product-case2", "product density published with the case2 speed",
            {"k0": 1.0, "k1": 1.0, **_PRODUCT}, _product_case2, lambda p: case2(p["k0"]), _product_case2_speed, _UNIT,
        ),
        CatalogEntry(
            "o1-gas", "isentropic gas dynamics density with the Von Karman law",
            {"k0": 1.0, "p0": 0.0}, _gas, lambda p: case2(p["k0"]), lambda p: case2(p["k0"]), _UNIT,
        ),
        CatalogEntry(
            "o2-elastic", "nonlinear elastic medium density",
            {"k1": 1.0}, _elastic, lambda p: case2(p["k1"]), lambda p: case2(p["k1"]), _UNIT,
        ),
    )
}

_KNOWN_KEYS = {"c0", "v0", "v1", "k0", "k1", "sep_k", "c1", "c2", "c3", "c4", "p0"}


def _entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownName(f"unknown catalog entry {name!r}", context={"known": ", ".join(sorted(CATALOG))})


def _resolve(entry: CatalogEntry, params: Optional[Params]) -> Dict[str, float]:
    params = dict(params or {})
    unknown = set(params) - _KNOWN_KEYS
    if unknown:
        raise InvalidParameter(f"unknown parameters for {entry.name}", context={"keys": ", ".join(sorted(unknown))})
    merged = dict(entry.defaults)
    if "v1" in params and "c0" not in params:
        merged.pop("c0", None)
    merged.update({key: float(value) for key, value in params.items()})
    return merged


def catalog(name: str, params: Optional[Params] = None) -> Density:
    """
    Build a catalog density

    Args:
        name: Entry name (t1, t2, product-case1, product-case2, o1-gas, o2-elastic)
        params: Constants overriding the entry defaults

    Raises:
        UnknownName: unknown entry
        InvalidParameter: unknown keys or inadmissible constants
    """
    entry = _entry(name)
    return entry.build(_resolve(entry, params))


def associated_speed(name: str, params: Optional[Params] = None) -> SpeedLaw:
    """Speed law the entry's density satisfies"""
    entry = _entry(name)
    return entry.speed(_resolve(entry, params))


def list_entries() -> List[str]:
    return sorted(CATALOG)


def validate_entry(
    name: str,
    params: Optional[Params] = None,
    rect: Optional[Rectangle] = None,
    n: Optional[int] = None,
) -> EntryValidation:
    """Wave residuals of an entry against its published and its effective speed"""
    entry = _entry(name)
    resolved = _resolve(entry, params)
    density = entry.build(resolved)
    points = (rect or entry.domain).points(n or settings.DEFAULT_GRID)
    printed = entry.printed_speed(resolved)
    effective = entry.speed(resolved)
    result = EntryValidation(
        name=name,
        printed_speed=printed.label(),
        printed_residual=wave_residual(density, printed, points),
        effective_speed=effective.label(),
        effective_residual=wave_residual(density, effective, points),
        tolerance=settings.WAVE_TOLERANCE,
    )
    if result.discrepancy:
        logger.warning(
            f"Catalog entry {name} does not satisfy its published speed {result.printed_speed} "
            f"(residual {result.printed_residual:.3e}); it satisfies {result.effective_speed}"
        )
    return result
