"""
Hodograph Service - implicit solutions of the p-system

A solution f(u, v) of f_vv + p'(v) f_uu = 0 defines u(x, t), v(x, t)
implicitly through x = f_v(u, v), t = f_u(u, v). Points are inverted by damped
Newton with the exact Jacobian; sweeps march along x reusing the previous
solution as the next guess and flag cells where the Jacobian degenerates
(gradient catastrophe) instead of aborting.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.config import settings
from ..core.errors import DomainError, GridTooSmall, InvalidParameter, NoConvergence, SingularJacobian
from .calculus import grid_derivative
from .density import Density
from .field import CellFlag, StateField
from .grid import Rectangle
from .pressure import PSystem
from .solutions import wave_residual

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class HodographMap:
    """Solution f of the symmetry equation and its admissible rectangle"""

    f: Density
    rect: Rectangle


def forward_map(m: HodographMap, u: float, v: float) -> Tuple[float, float, np.ndarray]:
    """
    (x, t) = (f_v, f_u) and the Jacobian d(x, t)/d(u, v) = [[f_uv, f_vv], [f_uu, f_uv]]
    """
    jet = m.f.jet(u, v)
    return jet.P, jet.Q, np.array([[jet.W, jet.S], [jet.R, jet.W]])


def _residual(m: HodographMap, u: float, v: float, x: float, t: float) -> Tuple[float, np.ndarray, np.ndarray]:
    X, T, J = forward_map(m, u, v)
    F = np.array([X - x, T - t])
    return float(np.max(np.abs(F))), F, J


def invert_point(m: HodographMap, x: float, t: float, guess: Tuple[float, float]) -> Tuple[float, float]:
    """
    Solve f_v(u, v) = x, f_u(u, v) = t by damped Newton from ``guess``

    Steps are halved (up to NEWTON_MAX_HALVINGS times) until the iterate stays
    inside the rectangle and the residual decreases. Converged when the
    residual is below 1e-10 and the step below 1e-12 * (1 + |u| + |v|).

    Raises:
        SingularJacobian: |det J| < 1e-12 * scale, scale = max(1, max|J|)^2
        NoConvergence: iteration or damping budget exhausted
    """
    u, v = float(guess[0]), float(guess[1])
    if not m.rect.contains(u, v):
        raise InvalidParameter("guess outside the admissible rectangle", context={"u": u, "v": v})

    res, F, J = _residual(m, u, v, x, t)
    for iteration in range(settings.NEWTON_MAX_ITER):
        scale = max(1.0, float(np.max(np.abs(J)))) ** 2
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if abs(det) < 1e-12 * scale:
            raise SingularJacobian(
                "vanishing hodograph Jacobian", context={"u": u, "v": v, "x": x, "t": t, "det": det}
            )
        delta = np.linalg.solve(J, F)

        damping = 1.0
        for _ in range(settings.NEWTON_MAX_HALVINGS + 1):
            un, vn = u - damping * delta[0], v - damping * delta[1]
            if m.rect.contains(un, vn):
                try:
                    new_res, new_F, new_J = _residual(m, un, vn, x, t)
                except DomainError:
                    new_res = math.inf
                if new_res < res or new_res <= 1e-14 * (1.0 + abs(x) + abs(t)):
                    break
            damping *= 0.5
        else:
            raise NoConvergence(
                "damping exhausted", context={"u": u, "v": v, "x": x, "t": t, "iteration": iteration}
            )

        step = damping * float(np.max(np.abs(delta)))
        u, v, res, F, J = un, vn, new_res, new_F, new_J
        if res < RESIDUAL_TOLERANCE and step < 1e-12 * (1.0 + abs(u) + abs(v)):
            logger.debug(f"Inverted ({x}, {t}) -> ({u}, {v}) in {iteration + 1} iterations")
            return u, v
        if res == 0.0:
            return u, v

    if res < RESIDUAL_TOLERANCE:
        return u, v
    raise NoConvergence("Newton iteration budget exhausted", context={"x": x, "t": t, "residual": res})


def _orientation(m: HodographMap, u: float, v: float) -> float:
    _, _, J = forward_map(m, u, v)
    return float(np.sign(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]))


def solve_field(m: HodographMap, xs: Sequence[float], t: float, seed: Tuple[float, float]) -> StateField:
    """
    March along xs at fixed t, chaining each solution into the next guess

    The sweep stays on the branch of the seed cell: cells raising
    SingularJacobian or converging where the Jacobian determinant has the
    opposite sign are flagged ``catastrophe``, cells failing to converge
    ``masked``; both hold NaN and the next guess comes from the last ok cell.
    Only the seed cell may fail the sweep.
    """
    xs = np.asarray(xs, dtype=float)
    n = xs.shape[0]
    u = np.full(n, np.nan)
    v = np.full(n, np.nan)
    flags = np.full(n, CellFlag.OK.value, dtype=object)

    u[0], v[0] = invert_point(m, float(xs[0]), t, seed)
    branch = _orientation(m, u[0], v[0])
    guess = (u[0], v[0])
    for j in range(1, n):
        try:
            uj, vj = invert_point(m, float(xs[j]), t, guess)
        except SingularJacobian:
            flags[j] = CellFlag.CATASTROPHE.value
            continue
        except NoConvergence:
            flags[j] = CellFlag.MASKED.value
            continue
        if _orientation(m, uj, vj) != branch:
            flags[j] = CellFlag.CATASTROPHE.value
            continue
        u[j], v[j] = uj, vj
        guess = (uj, vj)

    flagged = int(np.count_nonzero(flags != CellFlag.OK.value))
    if flagged:
        logger.warning(f"Hodograph sweep at t={t}: {flagged} of {n} cells flagged")
    return StateField.from_grid(xs, u, v, time=t, flags=flags)


def seed_scan(m: HodographMap, x: float, t: float, n: int = 32) -> Tuple[float, float]:
    """
    Grid point of an n x n scan whose image is nearest to (x, t)

    Ties resolve to the smallest u, then the smallest v.
    """
    best: Optional[Tuple[float, float, float]] = None
    for u, v in m.rect.points(n):
        try:
            X, T, _ = forward_map(m, u, v)
        except DomainError:
            continue
        distance = math.hypot(X - x, T - t)
        candidate = (distance, u, v)
        if best is None or candidate < best:
            best = candidate
    if best is None:
        raise NoConvergence("forward map undefined on the whole scan", context={"rect": m.rect.as_text()})
    logger.debug(f"Seed scan for ({x}, {t}) picked ({best[1]}, {best[2]}) at distance {best[0]:.3e}")
    return best[1], best[2]


def psystem_residual(
    fields: Tuple[StateField, StateField, StateField],
    p: PSystem,
) -> Tuple[float, float]:
    """
    Max-norm residuals of v_t - u_x and u_t + p(v)_x from three time slices

    Central difference in t across the outer slices, 4th-order stencils in x
    on the middle slice; cells within stencil reach of a flagged cell are skipped.
    """
    before, middle, after = fields
    if middle.n < 5:
        raise GridTooSmall("p-system residual needs at least 5 grid points", context={"points": middle.n})
    if not (before.n == middle.n == after.n):
        raise InvalidParameter("time slices must share the grid")
    dt = after.time - before.time
    if not dt > 0.0:
        raise InvalidParameter("time slices must be increasing", context={"dt": dt})

    ok = before.ok & middle.ok & after.ok
    usable = np.array([ok[j - 2 : j + 3].all() for j in range(2, middle.n - 2)])
    if not usable.any():
        return 0.0, 0.0

    interior = slice(2, middle.n - 2)
    safe_v = np.where(ok, middle.v, 1.0)
    safe_u = np.where(ok, middle.u, 0.0)
    pressure, _ = p.arrays(safe_v)
    u_x = grid_derivative(safe_u, middle.h, 1)
    p_x = grid_derivative(pressure, middle.h, 1)
    v_t = (after.v[interior] - before.v[interior]) / dt
    u_t = (after.u[interior] - before.u[interior]) / dt

    r1 = float(np.max(np.abs(v_t - u_x)[usable]))
    r2 = float(np.max(np.abs(u_t + p_x)[usable]))
    return r1, r2


def check_wave(m: HodographMap, p: PSystem, n: Optional[int] = None) -> float:
    """Wave residual of f against a^2 = -p'(v) on the map's rectangle"""
    return wave_residual(m.f, p.speed_law(), m.rect.points(n or settings.DEFAULT_GRID))


def time_slices(
    m: HodographMap, xs: Sequence[float], t: float, delta: float, seed: Tuple[float, float]
) -> Tuple[StateField, StateField, StateField]:
    """Fields at t - delta, t, t + delta, each seeded from the previous slice's first cell"""
    before = solve_field(m, xs, t - delta, seed)
    middle = solve_field(m, xs, t, (before.u[0], before.v[0]))
    after = solve_field(m, xs, t + delta, (middle.u[0], middle.v[0]))
    return before, middle, after
