"""
Errors Module - exception hierarchy shared by services and front ends

Every error carries a machine-readable code, surfaced as ``error_code`` in
HTTP error responses and JSON-lines reports.
"""

from typing import FrozenSet, Iterable, Optional


class HydrowaveError(Exception):
    """Base class for all domain errors"""

    code = "HYDROWAVE_ERROR"

    def __init__(self, message: str, *, context: Optional[dict] = None):
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{self.message} ({details})"


class ExpressionSyntaxError(HydrowaveError):
    """Malformed function expression"""

    code = "SYNTAX_ERROR"

    def __init__(self, message: str, offset: int, expected: Iterable[str]):
        self.offset = offset
        self.expected: FrozenSet[str] = frozenset(expected)
        super().__init__(
            f"{message} at byte offset {offset}; expected one of {sorted(self.expected)}"
        )


class DomainError(HydrowaveError):
    """Evaluation outside the domain of definition"""

    code = "DOMAIN_ERROR"


class SingularPoint(DomainError):
    """Evaluation on a singular manifold of a speed law"""

    code = "SINGULAR_POINT"


class InvalidParameter(HydrowaveError, ValueError):
    """Parameter value rejected by a constructor or operation"""

    code = "INVALID_PARAMETER"


class UnknownName(HydrowaveError, KeyError):
    """Unknown catalog entry, preset or spec kind"""

    code = "UNKNOWN_NAME"

    def __str__(self) -> str:
        return HydrowaveError.__str__(self)


class NoBracket(HydrowaveError):
    """No sign change found while bracketing a root"""

    code = "NO_BRACKET"


class NoConvergence(HydrowaveError):
    """Iterative solver exhausted its budget"""

    code = "NO_CONVERGENCE"


class SingularJacobian(HydrowaveError):
    """Vanishing hodograph Jacobian (gradient catastrophe signal)"""

    code = "SINGULAR_JACOBIAN"


class IntegrationFailure(HydrowaveError):
    """Adaptive ODE integration or quadrature failed"""

    code = "INTEGRATION_FAILURE"


class GridTooSmall(HydrowaveError):
    """Grid has too few points for the requested stencil"""

    code = "GRID_TOO_SMALL"


class HyperbolicityLoss(HydrowaveError):
    """p'(v) >= 0 somewhere on the field"""

    code = "HYPERBOLICITY_LOSS"


class CFLUnderflow(HydrowaveError):
    """Time step collapsed"""

    code = "CFL_UNDERFLOW"


class MaskedCells(HydrowaveError):
    """Field contains cells flagged as catastrophe or masked"""

    code = "MASKED_CELLS"
