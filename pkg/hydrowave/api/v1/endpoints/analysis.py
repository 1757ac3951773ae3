"""
Analysis Endpoints - residual checks of solutions, flows and constraints
"""

import logging

from fastapi import APIRouter, status
from fastapi.responses import JSONResponse

from ....core.errors import HydrowaveError
from ....schemas.analysis import (
    CommuteReport,
    CommuteRequest,
    ConstraintReport,
    ConstraintRequest,
    ErrorResponse,
    ResidualReport,
    ResidualRow,
    VerifyRequest,
)
from ....schemas.config import RunConfig
from ....services.runs import RunOutcome, run

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/analysis")

ERROR_RESPONSES = {
    400: {"model": ErrorResponse, "description": "Invalid input or inadmissible evaluation"},
    500: {"model": ErrorResponse, "description": "Internal server error"},
}


def internal_error(e: Exception) -> JSONResponse:
    logger.error(f"Unexpected error: {str(e)}", exc_info=True)
    body = ErrorResponse(error="An unexpected error occurred during analysis", error_code="INTERNAL_ERROR")
    return JSONResponse(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, content=body.model_dump())


def _rows(outcome: RunOutcome, include: bool):
    if not include or outcome.table is None:
        return []
    return [ResidualRow(u=u, v=v, residual=r) for u, v, r in outcome.table.rows]


@router.post("/verify", response_model=ResidualReport, responses=ERROR_RESPONSES)
def verify(request: VerifyRequest):
    """
    Wave-equation residual of a solution family

    ## Description
    Builds the case 1, 2 or 3 family from theta1 and theta2 and evaluates
    |f_vv - a^2 f_uu| / (1 + |f_uu| + |f_vv|) from exact jets over the grid.
    """
    try:
        logger.info(f"Verify request: case {request.case}, theta1={request.theta1!r}, theta2={request.theta2!r}")
        cfg = RunConfig(command="verify", **request.model_dump(exclude={"include_rows"}))
        outcome = run(cfg)
        return ResidualReport(report=outcome.report, rows=_rows(outcome, request.include_rows))
    except HydrowaveError:
        raise
    except Exception as e:
        return internal_error(e)


@router.post("/commute", response_model=CommuteReport, responses=ERROR_RESPONSES)
def commute(request: CommuteRequest):
    """
    Commutation of the flows of two densities

    A pass means h_uu f_vv = h_vv f_uu on the grid within tolerance.
    """
    try:
        logger.info(f"Commute request: h={request.h!r}, f={request.f!r}")
        cfg = RunConfig(command="commute", **request.model_dump(exclude={"include_rows"}))
        outcome = run(cfg)
        return CommuteReport(report=outcome.report, rows=_rows(outcome, request.include_rows))
    except HydrowaveError:
        raise
    except Exception as e:
        return internal_error(e)


@router.post("/constraint-check", response_model=ConstraintReport, responses=ERROR_RESPONSES)
def constraint_check(request: ConstraintRequest):
    """Compatibility residuals of the constraint derived for a speed law"""
    try:
        logger.info(f"Constraint request: speed={request.speed!r}, C={request.C!r}")
        outcome = run(RunConfig(command="constraint-check", **request.model_dump()))
        return ConstraintReport(report=outcome.report, residuals=dict(outcome.report.metrics))
    except HydrowaveError:
        raise
    except Exception as e:
        return internal_error(e)
