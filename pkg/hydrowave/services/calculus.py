"""
Calculus Service - shared numerical kernels

Central finite-difference stencils, Richardson extrapolation, convergence
order fitting, adaptive ODE integration, quadrature and bracketed root finding.
All kernels are pure and reentrant.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from ..core.config import settings
from ..core.errors import (
    DomainError,
    GridTooSmall,
    IntegrationFailure,
    InvalidParameter,
    NoBracket,
    NoConvergence,
)

logger = logging.getLogger(__name__)

Bivariate = Callable[[float, float], float]


@dataclass(frozen=True)
class Stencil:
    """Central finite-difference stencil for a first or second derivative"""

    order: int
    degree: int
    offsets: Tuple[int, ...]
    coefficients: Tuple[float, ...]

    @property
    def exactness(self) -> int:
        """Highest monomial degree differentiated exactly"""
        return self.order + self.degree - 1

    @property
    def width(self) -> int:
        return max(self.offsets)

    def apply(self, fn: Callable[[float], float], x: float, step: float) -> float:
        total = sum(c * fn(x + k * step) for k, c in zip(self.offsets, self.coefficients) if c)
        return total / step**self.degree


_STENCILS = {
    (1, 2): Stencil(2, 1, (-1, 0, 1), (-0.5, 0.0, 0.5)),
    (1, 4): Stencil(4, 1, (-2, -1, 0, 1, 2), (1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12)),
    (2, 2): Stencil(2, 2, (-1, 0, 1), (1.0, -2.0, 1.0)),
    (2, 4): Stencil(4, 2, (-2, -1, 0, 1, 2), (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)),
}


def stencil(degree: int, order: int = 4) -> Stencil:
    """Look up the central stencil for ``degree`` (1 or 2) at accuracy ``order`` (2 or 4)"""
    try:
        return _STENCILS[(degree, order)]
    except KeyError:
        raise InvalidParameter("unsupported stencil", context={"degree": degree, "order": order})


def default_step(coordinate: float) -> float:
    """Relative FD step: FD_STEP * (1 + |coordinate|)"""
    return settings.FD_STEP * (1.0 + abs(coordinate))


def _check_step(step: float) -> None:
    if not step > 0.0 or not math.isfinite(step):
        raise InvalidParameter("finite-difference step must be positive", context={"step": step})


def fd_derivative(
    fn: Callable[[float], float],
    x: float,
    degree: int = 1,
    step: Optional[float] = None,
    order: int = 4,
) -> float:
    """Central FD derivative of a single-variable function"""
    h = default_step(x) if step is None else step
    _check_step(h)
    return stencil(degree, order).apply(fn, x, h)


def fd_partial(
    field: Bivariate,
    point: Tuple[float, float],
    which: str,
    step: Optional[float] = None,
    order: int = 4,
) -> float:
    """
    Central FD partial derivative of a bivariate evaluator

    Args:
        field: Callable (u, v) -> value
        point: (u, v)
        which: One of "u", "v", "uu", "vv", "uv"
        step: FD step; defaults to the relative step at the point
        order: Accuracy order (2 or 4)

    Returns:
        FD approximation of the requested partial

    Raises:
        InvalidParameter: non-positive step or unknown ``which``
    """
    u, v = point
    if step is not None:
        _check_step(step)
    hu = default_step(u) if step is None else step
    hv = default_step(v) if step is None else step

    if which == "u":
        return stencil(1, order).apply(lambda s: field(s, v), u, hu)
    if which == "v":
        return stencil(1, order).apply(lambda s: field(u, s), v, hv)
    if which == "uu":
        return stencil(2, order).apply(lambda s: field(s, v), u, hu)
    if which == "vv":
        return stencil(2, order).apply(lambda s: field(u, s), v, hv)
    if which == "uv":
        first = stencil(1, order)
        return first.apply(lambda s: first.apply(lambda r: field(r, s), u, hu), v, hv)
    raise InvalidParameter(f"unknown partial {which!r}", context={"allowed": "u, v, uu, vv, uv"})


def grid_derivative(values: np.ndarray, h: float, degree: int = 1, order: int = 4, periodic: bool = False) -> np.ndarray:
    """
    FD derivative of samples on a uniform grid

    Periodic grids return one value per cell; otherwise only interior cells
    where the whole stencil fits are returned (length N - 2*width).
    """
    _check_step(h)
    st = stencil(degree, order)
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n < 2 * st.width + 1:
        raise GridTooSmall("grid too small for stencil", context={"points": n, "required": 2 * st.width + 1})

    if periodic:
        out = sum(c * np.roll(values, -k) for k, c in zip(st.offsets, st.coefficients) if c)
    else:
        w = st.width
        out = sum(c * values[w + k : n - w + k] for k, c in zip(st.offsets, st.coefficients) if c)
    return out / h**degree


def richardson(estimate: Callable[[float], float], step: float, order: int) -> float:
    """Richardson extrapolation of an O(step^order) estimate from steps h and h/2"""
    _check_step(step)
    coarse = estimate(step)
    fine = estimate(step / 2)
    factor = 2.0**order
    return (factor * fine - coarse) / (factor - 1.0)


def convergence_order(sizes: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(size)"""
    sizes = np.asarray(sizes, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if sizes.shape[0] < 2 or np.any(errors <= 0.0):
        raise InvalidParameter("need at least two positive errors to fit an order")
    slope, _ = np.polyfit(np.log(sizes), np.log(errors), 1)
    return float(slope)


def ode_integrate(
    weight: Callable[[float], float],
    start: Tuple[float, float, float],
    end: float,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Integrate G'' = weight(v) * G

    Args:
        weight: Coefficient function w(v)
        start: (v0, G(v0), G'(v0))
        end: Target v1
        rtol: Relative tolerance (default ODE_RTOL)
        atol: Absolute tolerance (default ODE_ATOL)

    Returns:
        (G(v1), G'(v1))

    Raises:
        IntegrationFailure: step control underflow or evaluation failure
    """
    v0, g0, dg0 = start

    def rhs(v, y):
        return [y[1], weight(v) * y[0]]

    y = chained_integrate(rhs, v0, [g0, dg0], end, rtol=rtol, atol=atol)
    return float(y[0]), float(y[1])


def chained_integrate(
    rhs: Callable[[float, np.ndarray], Sequence[float]],
    start: float,
    initial: Sequence[float],
    end: float,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> np.ndarray:
    """Integrate a first-order system y' = rhs(x, y) from ``start`` to ``end``"""
    initial = np.asarray(initial, dtype=float)
    if end == start:
        return initial.copy()
    try:
        result = solve_ivp(
            rhs,
            (start, end),
            initial,
            method="RK45",
            rtol=settings.ODE_RTOL if rtol is None else rtol,
            atol=settings.ODE_ATOL if atol is None else atol,
        )
    except DomainError as exc:
        raise IntegrationFailure(f"coefficient evaluation failed: {exc}", context={"from": start, "to": end}) from exc

    if not result.success:
        raise IntegrationFailure(result.message, context={"from": start, "to": end})
    logger.debug(f"Integrated {start} -> {end} in {result.nfev} evaluations")
    return result.y[:, -1]


def quadrature(fn: Callable[[float], float], a: float, b: float, tol: float = 1e-12) -> float:
    """Adaptive quadrature of ``fn`` over [a, b]"""
    if a == b:
        return 0.0
    try:
        value, error = quad(fn, a, b, epsabs=tol, epsrel=tol, limit=200, full_output=False)
    except DomainError as exc:
        raise IntegrationFailure(f"integrand evaluation failed: {exc}", context={"a": a, "b": b}) from exc
    if not math.isfinite(value):
        raise IntegrationFailure("quadrature returned a non-finite value", context={"a": a, "b": b})
    return float(value)


def scan_bracket(
    fn: Callable[[float], float],
    center: float,
    radius: float,
    steps: int = 64,
) -> Tuple[float, float]:
    """
    Find a sign change of ``fn`` by scanning outward from ``center``

    Trial offsets grow geometrically up to ``radius`` on both sides; points
    where ``fn`` is undefined are skipped.

    Raises:
        NoBracket: no sign change within the radius
    """

    def safe(x: float) -> Optional[float]:
        try:
            value = fn(x)
        except DomainError:
            return None
        return value if math.isfinite(value) else None

    f0 = safe(center)
    if f0 is not None and f0 == 0.0:
        return center, center

    offsets = np.geomspace(1e-8 * (1.0 + abs(center)), radius, steps)
    for direction in (1.0, -1.0):
        prev_x, prev_f = center, f0
        for offset in offsets:
            x = center + direction * offset
            fx = safe(x)
            if fx is not None and prev_f is not None and np.sign(fx) != np.sign(prev_f):
                return (prev_x, x) if prev_x < x else (x, prev_x)
            if fx is not None:
                prev_x, prev_f = x, fx
    raise NoBracket("no sign change found", context={"center": center, "radius": radius})


def find_root(fn: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-14, max_iter: int = 200) -> float:
    """Bracketed root (Brent's method: inverse interpolation with bisection safeguard)"""
    if lo == hi:
        return lo
    try:
        root, info = brentq(fn, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=max_iter, full_output=True)
    except ValueError as exc:
        raise NoBracket(str(exc), context={"lo": lo, "hi": hi}) from exc
    except RuntimeError as exc:
        raise NoConvergence(str(exc), context={"lo": lo, "hi": hi}) from exc
    if not info.converged:
        raise NoConvergence("root finder did not converge", context={"lo": lo, "hi": hi})
    return float(root)
