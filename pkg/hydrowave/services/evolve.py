"""
Evolution Service - conservative finite-difference evolution of the p-system

Conservation form w_t + F(w)_x = 0 with w = (v, u), F(w) = (-u, p(v)) on a
periodic grid. Lax-Friedrichs (first order) and Richtmyer two-step
Lax-Wendroff (second order) steppers with the time step recomputed from the
current maximal sound speed.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..core.errors import CFLUnderflow, InvalidParameter
from .density import Density
from .field import StateField
from .pressure import PSystem

logger = logging.getLogger(__name__)

SCHEMES = ("lxf", "lw")


def _flux(p: PSystem, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(flux of v, flux of u) = (-u, p(v))"""
    pressure, _ = p.arrays(v)
    return -u, pressure


def _check_cfl(cfl: float) -> None:
    if not 0.0 < cfl <= 1.0:
        raise InvalidParameter("cfl must lie in (0, 1]", context={"cfl": cfl})


def _time_step(s: StateField, p: PSystem, cfl: float, dt_max: Optional[float]) -> float:
    c_max = p.max_sound_speed(s.v)
    dt = cfl * s.h / c_max
    if dt_max is not None:
        dt = min(dt, dt_max)
    if not dt > 1e-14 * s.h:
        raise CFLUnderflow("time step collapsed", context={"dt": dt, "time": s.time, "c_max": c_max})
    return dt


def step_lax_friedrichs(s: StateField, p: PSystem, cfl: float, dt_max: Optional[float] = None) -> StateField:
    """
    One Lax-Friedrichs step

    Raises:
        HyperbolicityLoss: p'(v) >= 0 in some cell
        CFLUnderflow: time step collapsed
        MaskedCells: field has flagged cells
    """
    _check_cfl(cfl)
    s.require_ok()
    dt = _time_step(s, p, cfl, dt_max)
    ratio = dt / (2.0 * s.h)

    fv, fu = _flux(p, s.u, s.v)
    v_new = 0.5 * (np.roll(s.v, -1) + np.roll(s.v, 1)) - ratio * (np.roll(fv, -1) - np.roll(fv, 1))
    u_new = 0.5 * (np.roll(s.u, -1) + np.roll(s.u, 1)) - ratio * (np.roll(fu, -1) - np.roll(fu, 1))
    return s.with_state(u_new, v_new, s.time + dt)


def step_lax_wendroff(s: StateField, p: PSystem, cfl: float, dt_max: Optional[float] = None) -> StateField:
    """
    One Richtmyer two-step Lax-Wendroff step

    Raises:
        HyperbolicityLoss: p'(v) >= 0 in some cell (either stage)
        CFLUnderflow: time step collapsed
        MaskedCells: field has flagged cells
    """
    _check_cfl(cfl)
    s.require_ok()
    dt = _time_step(s, p, cfl, dt_max)
    ratio = dt / s.h

    # half step at cell interfaces j + 1/2
    fv, fu = _flux(p, s.u, s.v)
    v_half = 0.5 * (s.v + np.roll(s.v, -1)) - 0.5 * ratio * (np.roll(fv, -1) - fv)
    u_half = 0.5 * (s.u + np.roll(s.u, -1)) - 0.5 * ratio * (np.roll(fu, -1) - fu)
    p.max_sound_speed(v_half)

    gv, gu = _flux(p, u_half, v_half)
    v_new = s.v - ratio * (gv - np.roll(gv, 1))
    u_new = s.u - ratio * (gu - np.roll(gu, 1))
    return s.with_state(u_new, v_new, s.time + dt)


STEPPERS = {"lxf": step_lax_friedrichs, "lw": step_lax_wendroff}


def functional_monitor(s: StateField, d: Density) -> float:
    """
    Periodic trapezoid quadrature of d(u(x), v(x))

    Raises:
        MaskedCells: field has flagged cells
    """
    s.require_ok()
    return float(s.h * np.sum(d.values(s.u, s.v)))


@dataclass
class EvolutionResult:
    """Final field plus monitored functionals over time"""

    field: StateField
    steps: int
    times: List[float] = field(default_factory=list)
    monitors: Dict[str, List[float]] = field(default_factory=dict)

    def drift(self, name: str) -> float:
        """Relative change of a monitored functional between first and last sample"""
        values = self.monitors[name]
        start, end = values[0], values[-1]
        return abs(end - start) / max(abs(start), 1e-300)


def evolve(
    s: StateField,
    p: PSystem,
    scheme: str = "lw",
    cfl: float = 0.5,
    t_end: float = 1.0,
    monitors: Optional[Mapping[str, Density]] = None,
    sample_every: int = 1,
    max_steps: int = 1_000_000,
) -> EvolutionResult:
    """
    Evolve ``s`` to ``t_end``, landing exactly on it

    Monitors are sampled at the start, every ``sample_every`` steps and at the end.
    """
    if scheme not in STEPPERS:
        raise InvalidParameter(f"unknown scheme {scheme!r}", context={"allowed": ", ".join(SCHEMES)})
    _check_cfl(cfl)
    if t_end < s.time:
        raise InvalidParameter("t_end precedes the field time", context={"t_end": t_end, "time": s.time})
    if sample_every < 1:
        raise InvalidParameter("sample_every must be positive")

    stepper = STEPPERS[scheme]
    monitors = dict(monitors or {})
    result = EvolutionResult(field=s, steps=0)

    def sample(current: StateField) -> None:
        result.times.append(current.time)
        for name, density in monitors.items():
            result.monitors.setdefault(name, []).append(functional_monitor(current, density))

    logger.info(f"Evolving {s.n} cells with {scheme} from t={s.time} to t={t_end} (cfl={cfl})")
    sample(s)
    current = s
    while current.time < t_end:
        if result.steps >= max_steps:
            raise CFLUnderflow("step budget exhausted before t_end", context={"steps": result.steps, "time": current.time})
        remaining = t_end - current.time
        current = stepper(current, p, cfl, dt_max=remaining)
        result.steps += 1
        if t_end - current.time <= 1e-12 * (1.0 + abs(t_end)):
            current = current.with_state(current.u, current.v, t_end)
        if result.steps % sample_every == 0 and current.time < t_end:
            sample(current)

    sample(current)
    result.field = current
    logger.info(f"Evolution finished after {result.steps} steps")
    return result
