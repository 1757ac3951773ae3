"""
Request and Response Schemas - Pydantic models for analysis runs
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class Verdict(str, Enum):
    """Outcome of a verification run"""

    PASS = "pass"
    FAIL = "fail"


class ResidualRow(BaseModel):
    """Residual at one sample point"""

    u: float = Field(..., description="u coordinate")
    v: float = Field(..., description="v coordinate")
    residual: float = Field(..., description="Normalized residual")


class RunReport(BaseModel):
    """Machine-readable report of one analysis run"""

    success: bool = Field(default=True, description="Whether the run completed")
    command: str = Field(..., description="Executed subcommand")
    verdict: Verdict = Field(..., description="pass when every checked residual is within tolerance")
    tolerance: Optional[float] = Field(None, description="Threshold the verdict used")
    metrics: Dict[str, float] = Field(default={}, description="Residuals and other scalar results")
    provenance: Dict[str, Any] = Field(default={}, description="Families, parameters and expression sources")
    notes: List[str] = Field(default=[], description="Warnings and discrepancies")
    outputs: List[str] = Field(default=[], description="Files written")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "success": True,
                    "command": "verify",
                    "verdict": "pass",
                    "tolerance": 1e-8,
                    "metrics": {"max_residual": 3.1e-16, "points": 900},
                    "provenance": {"family": "case2", "k0": 1.0, "theta1": "s^2", "theta2": "0"},
                    "notes": [],
                    "outputs": [],
                }
            ]
        }
    }


class ErrorResponse(BaseModel):
    """Schema for error response"""

    success: bool = Field(default=False, description="Whether operation succeeded")
    error: str = Field(..., description="Error message")
    error_code: str = Field(..., description="Error code for categorization")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "success": False,
                    "error": "unexpected end of input at byte offset 4; expected one of ['(', '-', 'number', 's']",
                    "error_code": "SYNTAX_ERROR",
                }
            ]
        }
    }


class VerifyRequest(BaseModel):
    """Wave-equation residual check of a solution family"""

    case: Literal[1, 2, 3] = Field(..., description="Speed case")
    c0: Optional[float] = Field(None, description="Case 1 constant c0")
    v0: Optional[float] = Field(None, description="Case 1 constant v0")
    k0: Optional[float] = Field(None, description="Case 2 constant k0")
    k1: Optional[float] = Field(None, description="Case 3 constant k1")
    theta1: str = Field(default="0", description="theta1 expression in s")
    theta2: str = Field(default="0", description="theta2 expression in s")
    domain: str = Field(default="u=1:2,v=1:2", description="Admissible rectangle")
    grid: int = Field(default=30, ge=2, le=400, description="Grid points per axis")
    tolerance: Optional[float] = Field(None, gt=0, description="Residual threshold")
    include_rows: bool = Field(default=False, description="Return the pointwise residual table")

    model_config = {
        "json_schema_extra": {
            "examples": [{"case": 2, "k0": 1.0, "theta1": "s^2", "theta2": "0", "domain": "u=1:2,v=1:2", "grid": 30}]
        }
    }


class CommuteRequest(BaseModel):
    """Commuting-flow check of two densities"""

    h: str = Field(..., description="Density spec of the Hamiltonian", examples=["catalog:t2,k0=1"])
    f: str = Field(..., description="Density spec of the second flow", examples=["case2:k0=1,theta1=s^3,theta2=exp(s)"])
    domain: str = Field(default="u=1:2,v=1:2", description="Sample rectangle")
    grid: int = Field(default=30, ge=2, le=400, description="Grid points per axis")
    tolerance: Optional[float] = Field(None, gt=0, description="Residual threshold")
    include_rows: bool = Field(default=False, description="Return the pointwise residual table")


class ConstraintRequest(BaseModel):
    """Compatibility check of derived constraint data"""

    speed: str = Field(..., description="Speed spec", examples=["case2:k0=1"])
    C: Optional[str] = Field(None, description="Free function C(eta)")
    perturb: float = Field(default=0.0, description="Shift added to lam (negative controls)")
    domain: str = Field(default="u=1:2,v=1:2", description="Sample rectangle")
    grid: int = Field(default=20, ge=2, le=200, description="Grid points per axis")
    tolerance: Optional[float] = Field(None, gt=0, description="Residual threshold")


class HodographRequest(BaseModel):
    """Implicit p-system solution along an x-grid at fixed t"""

    pressure: str = Field(..., description="Pressure spec", examples=["case2:k0=1"])
    theta1: str = Field(default="0", description="theta1 of the case2 family")
    theta2: str = Field(default="0", description="theta2 of the case2 family")
    density: Optional[str] = Field(None, description="Density spec overriding the case2 family")
    t: float = Field(..., description="Time")
    x: str = Field(..., description="Axis lo:hi:n", examples=["2.5:3.5:101"])
    seed: Optional[str] = Field(None, description="Initial guess u,v; scanned when omitted")
    domain: str = Field(default="u=0.5:4,v=0.5:4", description="Admissible rectangle for Newton")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"pressure": "case2:k0=1", "theta1": "s^2", "theta2": "0", "t": 6, "x": "2.5:3.5:101", "seed": "1.826,1.095"}
            ]
        }
    }


class FieldReport(BaseModel):
    """Hodograph field with per-cell flags"""

    report: RunReport = Field(..., description="Run summary")
    x: List[float] = Field(default=[], description="Grid")
    u: List[Optional[float]] = Field(default=[], description="u values (null where flagged)")
    v: List[Optional[float]] = Field(default=[], description="v values (null where flagged)")
    flags: List[str] = Field(default=[], description="ok | catastrophe | masked")


class ResidualReport(BaseModel):
    """Run summary with optional pointwise residual table"""

    report: RunReport = Field(..., description="Run summary")
    rows: List[ResidualRow] = Field(default=[], description="Pointwise residuals")


class CommuteReport(ResidualReport):
    """Commutation verdict with the pointwise residual table"""


class ConstraintReport(BaseModel):
    """Compatibility residuals of derived constraint data"""

    report: RunReport = Field(..., description="Run summary")
    residuals: Dict[str, float] = Field(default={}, description="r1 = lam_f, r2 and r3 compatibility residuals")
