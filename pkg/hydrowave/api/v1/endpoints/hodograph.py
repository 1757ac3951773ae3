"""
Hodograph Endpoints - implicit p-system solutions
"""

import logging
import math

from fastapi import APIRouter

from ....core.errors import HydrowaveError
from ....schemas.analysis import FieldReport, HodographRequest
from ....schemas.config import RunConfig
from ....services.runs import run
from .analysis import ERROR_RESPONSES, internal_error

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/hodograph")


def _finite(value: float):
    return None if math.isnan(value) else float(value)


@router.post("/solve", response_model=FieldReport, responses=ERROR_RESPONSES)
def solve(request: HodographRequest):
    """
    Solve x = f_v(u, v), t = f_u(u, v) along an x-grid

    ## Returns
    - u, v per grid point (null where the cell is flagged)
    - flags: ok, catastrophe (vanishing Jacobian) or masked (no convergence)
    - the wave residual of f against the pressure's sound speed
    """
    try:
        logger.info(f"Hodograph request: pressure={request.pressure!r}, t={request.t}, x={request.x!r}")
        outcome = run(RunConfig(command="hodograph", **request.model_dump()))
        field = outcome.field
        return FieldReport(
            report=outcome.report,
            x=[float(x) for x in field.xs],
            u=[_finite(u) for u in field.u],
            v=[_finite(v) for v in field.v],
            flags=[str(flag) for flag in field.flags],
        )
    except HydrowaveError:
        raise
    except Exception as e:
        return internal_error(e)
