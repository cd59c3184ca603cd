"""Independent re-check of solver certificates.

Nothing here reuses the simplex tableau: each certificate is recombined
against the program's canonical rows with fresh exact arithmetic.
"""

from fractions import Fraction
from typing import List, Sequence
import logging

from src.conecert.solver.program import (
    CanonicalRow,
    LinearProgram,
    LpOutcome,
    LpStatus,
    MalformedProgramError,
    Sense,
    canonical_rows,
)


# Configure module logger
logger = logging.getLogger(__name__)

ZERO = Fraction(0)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), ZERO)


def _recombine(rows: List[CanonicalRow], weights: Sequence[Fraction], width: int) -> List[Fraction]:
    total = [ZERO] * width
    for row, w in zip(rows, weights):
        if w == 0:
            continue
        for k, a in enumerate(row.coefficients):
            if a != 0:
                total[k] += w * a
    return total


def _signs_ok(rows: List[CanonicalRow], weights: Sequence[Fraction]) -> bool:
    return all(row.is_equality or w >= 0 for row, w in zip(rows, weights))


def is_feasible_point(lp: LinearProgram, point: Sequence[Fraction]) -> bool:
    """True if ``point`` satisfies every row and bound exactly."""
    if point is None or len(point) != lp.num_variables:
        return False
    for row in canonical_rows(lp):
        lhs = _dot(row.coefficients, point)
        if row.is_equality and lhs != row.rhs:
            return False
        if not row.is_equality and lhs > row.rhs:
            return False
    return True


def _max_objective(lp: LinearProgram) -> List[Fraction]:
    if lp.sense is Sense.MAXIMIZE:
        return [Fraction(c) for c in lp.objective]
    return [-Fraction(c) for c in lp.objective]


def verify_certificate(lp: LinearProgram, outcome: LpOutcome) -> bool:
    """Check that ``outcome`` arithmetically proves its claimed status.

    - optimal: the point is feasible, its objective equals the value, and
      the multipliers are dual feasible with the same objective value
    - infeasible: sign-correct multipliers recombine the rows to 0 <= b
      with b < 0
    - unbounded: the point is feasible and the ray is a recession direction
      that strictly improves the objective

    Returns:
        True iff the certificate is valid for ``lp``
    """
    try:
        lp.validate()
        rows = canonical_rows(lp)
    except MalformedProgramError:
        return False
    n = lp.num_variables
    c_max = _max_objective(lp)

    if outcome.status is LpStatus.OPTIMAL:
        if outcome.value is None or outcome.multipliers is None:
            return False
        if not is_feasible_point(lp, outcome.point):
            logger.debug("Optimal point violates a row")
            return False
        if _dot(lp.objective, outcome.point) != outcome.value:
            return False
        y = outcome.multipliers
        if len(y) != len(rows) or not _signs_ok(rows, y):
            return False
        if _recombine(rows, y, n) != c_max:
            return False
        value_max = outcome.value if lp.sense is Sense.MAXIMIZE else -outcome.value
        return _dot(y, [row.rhs for row in rows]) == value_max

    if outcome.status is LpStatus.INFEASIBLE:
        y = outcome.multipliers
        if y is None or len(y) != len(rows) or not _signs_ok(rows, y):
            return False
        if any(v != 0 for v in _recombine(rows, y, n)):
            return False
        return _dot(y, [row.rhs for row in rows]) < 0

    if outcome.status is LpStatus.UNBOUNDED:
        ray = outcome.ray
        if ray is None or len(ray) != n or not is_feasible_point(lp, outcome.point):
            return False
        for row in rows:
            slope = _dot(row.coefficients, ray)
            if row.is_equality and slope != 0:
                return False
            if not row.is_equality and slope > 0:
                return False
        return _dot(c_max, ray) > 0

    return False
