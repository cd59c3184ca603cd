"""Exact rational linear programming with certificates."""

from src.conecert.solver.program import (
    Relation,
    Sense,
    LpStatus,
    Constraint,
    LinearProgram,
    CanonicalRow,
    LpOutcome,
    LpBuilder,
    MalformedProgramError,
    canonical_rows,
)
from src.conecert.solver.simplex import (
    LpSolver,
    BlandSimplexSolver,
    PivotLimitError,
    solve,
)
from src.conecert.solver.certificate import (
    is_feasible_point,
    verify_certificate,
)

__all__ = [
    "Relation",
    "Sense",
    "LpStatus",
    "Constraint",
    "LinearProgram",
    "CanonicalRow",
    "LpOutcome",
    "LpBuilder",
    "MalformedProgramError",
    "canonical_rows",
    "LpSolver",
    "BlandSimplexSolver",
    "PivotLimitError",
    "solve",
    "is_feasible_point",
    "verify_certificate",
]
