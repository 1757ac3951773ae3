"""
Commute Service - commuting-flow checks for two-component Hamiltonian systems

A density h generates u_t = V(u) u_x with V = eta * Hess(h) and eta the
constant off-diagonal metric, i.e. V = [[h_uv, h_vv], [h_uu, h_uv]].
Two flows commute iff h_uu f_vv - h_vv f_uu = 0.
"""

import logging
from typing import Iterable, List, Optional, Tuple

import numpy as np

from ..core.config import settings
from ..core.errors import GridTooSmall
from .calculus import grid_derivative, stencil
from .density import Density
from .field import StateField

logger = logging.getLogger(__name__)

FlowMatrix = np.ndarray


def flow_matrix(h: Density, u: float, v: float) -> FlowMatrix:
    """V(u, v) = [[h_uv, h_vv], [h_uu, h_uv]] from the exact jet"""
    jet = h.jet(u, v)
    return np.array([[jet.W, jet.S], [jet.R, jet.W]])


def _pointwise(h: Density, f: Density, u: float, v: float) -> float:
    jh, jf = h.jet(u, v), f.jet(u, v)
    a = jh.R * jf.S
    b = jh.S * jf.R
    return abs(a - b) / (1.0 + abs(a) + abs(b))


def commute_residuals(h: Density, f: Density, points: Iterable[Tuple[float, float]]) -> List[float]:
    """Pointwise normalized |h_uu f_vv - h_vv f_uu|"""
    return [_pointwise(h, f, u, v) for u, v in points]


def commute_residual(h: Density, f: Density, points: Iterable[Tuple[float, float]]) -> float:
    """
    Max over points of |h_uu f_vv - h_vv f_uu| / (1 + |h_uu f_vv| + |h_vv f_uu|)

    Symmetric in (h, f).
    """
    return max(commute_residuals(h, f, points), default=0.0)


def _matrix_gradient(density: Density, u: float, v: float, step: float) -> Tuple[FlowMatrix, FlowMatrix]:
    """(dV/du, dV/dv) by 4th-order central differences of flow_matrix"""
    first = stencil(1, 4)
    du = sum(c * flow_matrix(density, u + k * step, v) for k, c in zip(first.offsets, first.coefficients) if c)
    dv = sum(c * flow_matrix(density, u, v + k * step) for k, c in zip(first.offsets, first.coefficients) if c)
    return du / step, dv / step


def tensor_commutation_residual(
    h: Density,
    f: Density,
    field: StateField,
    fd_step: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Residuals of the tensorial commutation conditions along a discrete field

    With V from h, A from f and w = (u, v)(x):

        a1 = (A V - V A) w_xx
        a2 = A_{,j} w_x (V w_x)^j + A (w_x . grad V) w_x
             - V_{,j} w_x (A w_x)^j - V (w_x . grad A) w_x

    Spatial derivatives use 4th-order stencils on interior cells; field-space
    derivatives of V and A use central differences with ``fd_step``.

    Returns:
        (max |a1|, max |a2|) over interior ok cells

    Raises:
        GridTooSmall: fewer than 5 grid points
    """
    if field.n < 5:
        raise GridTooSmall("tensor residual needs at least 5 grid points", context={"points": field.n})
    step = settings.FD_STEP * 10.0 if fd_step is None else fd_step

    u_x = grid_derivative(field.u, field.h, 1)
    v_x = grid_derivative(field.v, field.h, 1)
    u_xx = grid_derivative(field.u, field.h, 2)
    v_xx = grid_derivative(field.v, field.h, 2)
    interior = range(2, field.n - 2)
    ok = field.ok

    r_a1 = 0.0
    r_a2 = 0.0
    for idx, j in enumerate(interior):
        if not ok[j - 2 : j + 3].all():
            continue
        u, v = field.u[j], field.v[j]
        V = flow_matrix(h, u, v)
        A = flow_matrix(f, u, v)
        w_x = np.array([u_x[idx], v_x[idx]])
        w_xx = np.array([u_xx[idx], v_xx[idx]])

        a1 = (A @ V - V @ A) @ w_xx

        dA = _matrix_gradient(f, u, v, step)
        dV = _matrix_gradient(h, u, v, step)
        Vw = V @ w_x
        Aw = A @ w_x
        dA_along = w_x[0] * dA[0] + w_x[1] * dA[1]
        dV_along = w_x[0] * dV[0] + w_x[1] * dV[1]
        term1 = sum(Vw[k] * (dA[k] @ w_x) for k in range(2))
        term2 = A @ dV_along @ w_x
        term3 = sum(Aw[k] * (dV[k] @ w_x) for k in range(2))
        term4 = V @ dA_along @ w_x
        a2 = term1 + term2 - term3 - term4

        r_a1 = max(r_a1, float(np.max(np.abs(a1))))
        r_a2 = max(r_a2, float(np.max(np.abs(a2))))

    logger.debug(f"Tensor commutation residuals: a1={r_a1:.3e}, a2={r_a2:.3e}")
    return r_a1, r_a2
