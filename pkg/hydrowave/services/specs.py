"""
Spec Strings - text syntax for densities, speeds, pressures and domains

Shared by the CLI, config files and the HTTP API::

    catalog:t2,k0=1                 case2:k0=1,theta1=s^2,theta2=0
    trivial:c3=1                    u:s^4
    separable:case=2,k0=1,mu=1,g0=1,dg0=0,ref=1
    general:A=1/sqrt(s),B=1/sqrt(s) custom-v:1/s^4
    vonkarman:k0=1,p0=0             expr:1/(3*s^3)
    u=1:2,v=1:2                     2.5:3.5:101
    sine:u0=0,v0=1,amp=0.05         constant:u0=0,v0=1

Commas inside parentheses never split parameters.
"""

import logging
from typing import Dict, List, Tuple

import numpy as np

from ..core.errors import InvalidParameter, UnknownName
from .catalog import catalog
from .density import Density, density_of_u, density_of_v
from .exprlang import parse_expr
from .field import StateField
from .grid import Rectangle
from .pressure import PSystem, case2_pressure, expression_pressure, von_karman
from .solutions import family_case1, family_case2, family_case3, family_separable, trivial_density
from .speedlaw import SpeedLaw, case1, case2, case3, constant, custom_u, custom_v, general_abc

logger = logging.getLogger(__name__)

INIT_PRESETS = ("sine", "constant")


def split_top_level(text: str, separator: str = ",") -> List[str]:
    """Split on ``separator`` outside parentheses"""
    parts: List[str] = []
    depth = 0
    current = []
    for char in text:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char == separator and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(char)
    parts.append("".join(current).strip())
    return [part for part in parts if part]


def _split_kind(text: str) -> Tuple[str, str]:
    if ":" not in text:
        raise InvalidParameter(f"spec {text!r} must look like kind:params")
    kind, _, body = text.partition(":")
    return kind.strip().lower(), body.strip()


def _parameters(body: str) -> Dict[str, str]:
    params: Dict[str, str] = {}
    for item in split_top_level(body):
        if "=" not in item:
            raise InvalidParameter(f"parameter {item!r} must look like key=value")
        key, _, value = item.partition("=")
        params[key.strip()] = value.strip()
    return params


def _number(params: Dict[str, str], key: str, default=None) -> float:
    if key not in params:
        if default is None:
            raise InvalidParameter(f"missing parameter {key!r}")
        return float(default)
    try:
        return float(params[key])
    except ValueError:
        raise InvalidParameter(f"parameter {key!r} must be a number", context={"value": params[key]})


def _reject_extra(params: Dict[str, str], allowed: set, kind: str) -> None:
    extra = set(params) - allowed
    if extra:
        raise InvalidParameter(f"unknown parameters for {kind}", context={"keys": ", ".join(sorted(extra))})


def parse_catalog_spec(text: str) -> Tuple[str, Dict[str, float]]:
    """(entry name, constants) from ``catalog:<name>,k=v,...``"""
    kind, body = _split_kind(text)
    if kind != "catalog":
        raise InvalidParameter(f"spec {text!r} is not a catalog spec")
    name, *rest = split_top_level(body) or [""]
    params = _parameters(",".join(rest))
    return name, {key: _number(params, key) for key in params}


def parse_density_spec(text: str) -> Density:
    """Density from ``kind:params`` text"""
    kind, body = _split_kind(text)
    if kind == "catalog":
        return catalog(*parse_catalog_spec(text))
    if kind == "u":
        return density_of_u(parse_expr(body))
    if kind == "v":
        return density_of_v(parse_expr(body))

    params = _parameters(body)
    theta1 = parse_expr(params.get("theta1", "0"))
    theta2 = parse_expr(params.get("theta2", "0"))
    if kind == "case1":
        _reject_extra(params, {"c0", "v0", "theta1", "theta2"}, kind)
        return family_case1(_number(params, "c0"), _number(params, "v0"), theta1, theta2)
    if kind == "case2":
        _reject_extra(params, {"k0", "theta1", "theta2"}, kind)
        return family_case2(_number(params, "k0"), theta1, theta2)
    if kind == "case3":
        _reject_extra(params, {"k1", "theta1", "theta2"}, kind)
        return family_case3(_number(params, "k1"), theta1, theta2)
    if kind == "trivial":
        _reject_extra(params, {"c1", "c2", "c3", "c4"}, kind)
        return trivial_density(*(_number(params, key, 0.0) for key in ("c1", "c2", "c3", "c4")))
    if kind == "separable":
        _reject_extra(params, {"case", "k0", "k1", "a2", "mu", "g0", "dg0", "ref", "vref", "c1", "c2"}, kind)
        speed = _separable_speed(params)
        return family_separable(
            speed,
            _number(params, "mu"),
            g0=_number(params, "g0", 1.0),
            dg0=_number(params, "dg0", 1.0),
            ref=_number(params, "ref", _number(params, "vref", 0.0)),
            c1=_number(params, "c1", 1.0),
            c2=_number(params, "c2", 0.0),
        )
    raise UnknownName(f"unknown density kind {kind!r}")


def _separable_speed(params: Dict[str, str]) -> SpeedLaw:
    case = params.get("case", "2")
    if case == "2":
        return case2(_number(params, "k0"))
    if case == "3":
        return case3(_number(params, "k1"))
    if case == "const":
        return constant(_number(params, "a2"))
    raise UnknownName(f"unknown separable speed case {case!r}", context={"allowed": "2, 3, const"})


def parse_speed_spec(text: str) -> SpeedLaw:
    """Speed law from ``kind:params`` text"""
    kind, body = _split_kind(text)
    if kind == "custom-v":
        return custom_v(parse_expr(body))
    if kind == "custom-u":
        return custom_u(parse_expr(body))
    params = _parameters(body)
    if kind == "case1":
        _reject_extra(params, {"c0", "v0", "v1"}, kind)
        c0 = _number(params, "c0") if "c0" in params else None
        v1 = _number(params, "v1") if "v1" in params else None
        return case1(c0=c0, v0=_number(params, "v0"), v1=v1)
    if kind == "case2":
        _reject_extra(params, {"k0"}, kind)
        return case2(_number(params, "k0"))
    if kind == "case3":
        _reject_extra(params, {"k1"}, kind)
        return case3(_number(params, "k1"))
    if kind == "general":
        _reject_extra(params, {"A", "B", "C"}, kind)
        if "A" not in params or "B" not in params:
            raise InvalidParameter("general speed needs A and B")
        return general_abc(parse_expr(params["A"]), parse_expr(params["B"]), parse_expr(params.get("C", "0")))
    raise UnknownName(f"unknown speed kind {kind!r}")


def parse_pressure_spec(text: str) -> PSystem:
    """Pressure law from ``kind:params`` text"""
    kind, body = _split_kind(text)
    if kind == "expr":
        return expression_pressure(body)
    params = _parameters(body)
    if kind == "case2":
        _reject_extra(params, {"k0", "p0"}, kind)
        return case2_pressure(_number(params, "k0"), _number(params, "p0", 0.0))
    if kind == "vonkarman":
        _reject_extra(params, {"k0", "p0"}, kind)
        return von_karman(_number(params, "k0"), _number(params, "p0", 0.0))
    raise UnknownName(f"unknown pressure kind {kind!r}")


def parse_range(text: str) -> Tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise InvalidParameter(f"range {text!r} must look like lo:hi")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise InvalidParameter(f"range {text!r} must contain numbers")


def parse_domain(text: str) -> Rectangle:
    """Rectangle from ``u=a:b,v=c:d``"""
    params = _parameters(text)
    if set(params) != {"u", "v"}:
        raise InvalidParameter(f"domain {text!r} must give exactly u=lo:hi and v=lo:hi")
    (u_lo, u_hi), (v_lo, v_hi) = parse_range(params["u"]), parse_range(params["v"])
    return Rectangle(u_lo, u_hi, v_lo, v_hi)


def parse_axis(text: str) -> np.ndarray:
    """Uniform grid from ``lo:hi:n`` or a single value"""
    parts = text.split(":")
    if len(parts) not in (1, 3):
        raise InvalidParameter(f"axis {text!r} must look like lo:hi:n")
    try:
        values = [float(part) for part in parts[:2]]
        n = int(parts[2]) if len(parts) == 3 else 1
    except ValueError:
        raise InvalidParameter(f"axis {text!r} must contain numbers")
    if len(parts) == 1:
        return np.array(values)
    if n < 1:
        raise InvalidParameter("axis needs at least one point", context={"n": n})
    return np.linspace(values[0], values[1], n)


def parse_pair(text: str) -> Tuple[float, float]:
    """(a, b) from ``a,b``"""
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidParameter(f"pair {text!r} must look like a,b")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise InvalidParameter(f"pair {text!r} must contain numbers")


def parse_init_spec(text: str, cells: int) -> StateField:
    """
    Periodic preset field

    ``sine:u0=0,v0=1,amp=0.05,mode=1,x0=0,x1=1`` gives u = u0 + amp*sin(k x),
    v = v0 + amp*cos(k x) with k = 2*pi*mode/(x1 - x0).
    ``constant:u0=0,v0=1,x0=0,x1=1`` gives the uniform state (u0, v0).
    """
    kind, body = _split_kind(text)
    if kind not in INIT_PRESETS:
        raise UnknownName(f"unknown initial field preset {kind!r}", context={"allowed": ", ".join(INIT_PRESETS)})
    params = _parameters(body)
    allowed = {"u0", "v0", "x0", "x1"} | ({"amp", "mode"} if kind == "sine" else set())
    _reject_extra(params, allowed, kind)
    u0, v0 = _number(params, "u0", 0.0), _number(params, "v0", 1.0)
    x0, x1 = _number(params, "x0", 0.0), _number(params, "x1", 1.0)
    if not x1 > x0:
        raise InvalidParameter("preset interval must satisfy x0 < x1", context={"x0": x0, "x1": x1})
    if kind == "constant":
        return StateField.periodic(x0, x1, cells, u0, v0)
    amp, mode = _number(params, "amp", 0.05), _number(params, "mode", 1.0)
    k = 2.0 * np.pi * mode / (x1 - x0)
    return StateField.periodic(x0, x1, cells, lambda x: u0 + amp * np.sin(k * x), lambda x: v0 + amp * np.cos(k * x))
