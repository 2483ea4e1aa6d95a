"""Exact linear programming with certificates."""

from .exact import DEFAULT_MAX_PIVOTS, PivotLimitExceeded, solve_exact
from .floating import solve_float_then_certify
from .model import (
    EQ,
    GE,
    LE,
    CertificateError,
    Constraint,
    LinearProgram,
    LpDimensionError,
    LpError,
    LpOutcome,
    Status,
    verify_outcome,
)

MODES = ("exact", "float-certified")


def solve(lp: LinearProgram, mode: str = "exact", **kwargs) -> LpOutcome:
    if mode == "exact":
        return solve_exact(lp, **kwargs)
    if mode == "float-certified":
        return solve_float_then_certify(lp, **kwargs)
    raise ValueError(f"unknown LP mode {mode!r}; expected one of {MODES}")


__all__ = [
    "DEFAULT_MAX_PIVOTS", "EQ", "GE", "LE", "MODES", "CertificateError", "Constraint",
    "LinearProgram", "LpDimensionError", "LpError", "LpOutcome", "PivotLimitExceeded",
    "Status", "solve", "solve_exact", "solve_float_then_certify", "verify_outcome",
]
