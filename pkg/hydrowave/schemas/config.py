"""
Run Configuration Schema - one validated CLI invocation

Values come from a key=value config file and are overridden by flags.
Unknown keys are rejected.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from ..core.config import settings

Command = Literal["verify", "commute", "hodograph", "evolve", "nutku", "constraint-check"]


class RunConfig(BaseModel):
    """Validated configuration of a single run"""

    command: Command = Field(..., description="Subcommand")

    # families and specs
    case: Optional[int] = Field(None, ge=1, le=3, description="Speed case of the solution family")
    c0: Optional[float] = Field(None, description="Case 1 constant c0")
    v0: Optional[float] = Field(None, description="Case 1 constant v0")
    v1: Optional[float] = Field(None, description="Case 1 constant v1 = v0 - c0")
    k0: Optional[float] = Field(None, description="Case 2 constant k0")
    k1: Optional[float] = Field(None, description="Case 3 constant k1")
    theta1: str = Field(default="0", description="theta1 expression in s")
    theta2: str = Field(default="0", description="theta2 expression in s")
    density: Optional[str] = Field(None, description="Density spec")
    speed: Optional[str] = Field(None, description="Speed spec")
    h: Optional[str] = Field(None, description="Density spec of the Hamiltonian")
    f: Optional[str] = Field(None, description="Density spec of the second flow")
    C: Optional[str] = Field(None, description="Free function C(eta) of the constraint")
    perturb: float = Field(default=0.0, description="Shift added to lam")
    pressure: Optional[str] = Field(None, description="Pressure spec")

    # grids
    domain: Optional[str] = Field(None, description="Rectangle u=a:b,v=c:d; per-command default when omitted")
    grid: int = Field(default=settings.DEFAULT_GRID, gt=1, description="Grid points per axis")
    tolerance: Optional[float] = Field(None, gt=0, description="Verdict threshold")
    fd_step: Optional[float] = Field(None, gt=0, description="Absolute finite-difference step")

    # hodograph
    t: Optional[float] = Field(None, description="Time of the hodograph slice")
    x: Optional[str] = Field(None, description="x axis lo:hi:n")
    seed: Optional[str] = Field(None, description="Newton seed u,v")

    # evolution
    init: Optional[str] = Field(None, description="Initial field: CSV path or preset")
    scheme: Literal["lxf", "lw"] = Field(default="lw", description="Finite-difference scheme")
    cfl: float = Field(default=0.5, gt=0, le=1, description="Courant number")
    tend: float = Field(default=1.0, description="Final time")
    cells: int = Field(default=200, gt=4, description="Cells of preset initial fields")
    monitor: List[str] = Field(default=[], description="Density specs of monitored functionals")
    sample_every: int = Field(default=1, gt=0, description="Monitor sampling interval in steps")

    # separable tower
    alpha: str = Field(default="1", description="alpha(u)")
    beta: str = Field(default="1", description="beta(v)")
    F0: str = Field(default="1", description="Linear seed F0(u)")
    G0: str = Field(default="1", description="Linear seed G0(v)")
    n: int = Field(default=3, gt=0, description="Tower depth")
    corner: Optional[str] = Field(None, description="Corner u0,v0 where the data vanish; lower-left of the domain when omitted")

    # output
    out: Optional[str] = Field(None, description="CSV output path")
    monitor_out: Optional[str] = Field(None, description="CSV path of monitored functionals")
    report: Optional[str] = Field(None, description="Report path; stdout when omitted")
    format: Literal["text", "json-lines"] = Field(default="text", description="Report format")
    threads: Optional[int] = Field(None, gt=0, description="Grid parallelism")

    model_config = {"extra": "forbid"}

    @field_validator("monitor", mode="before")
    @classmethod
    def split_monitor(cls, value):
        """Config files give a single monitor spec as text"""
        if isinstance(value, str):
            return [value] if value else []
        return value

    @field_validator("theta1", "theta2", "alpha", "beta", "F0", "G0")
    @classmethod
    def not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("expression must not be empty")
        return value
