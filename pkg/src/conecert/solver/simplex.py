"""Exact simplex method over the rationals.

The program is brought to the form "maximize c.z subject to A z <= b,
z >= 0" (bounded-below variables are shifted, free variables are split,
">=" and "=" rows become one or two "<=" rows, upper bounds become rows) and
solved on a dictionary tableau in which every basic variable is written as
b_i minus a combination of the nonbasic ones. Infeasible starts go through
the auxiliary-variable first phase. Pivoting follows Bland's rule, so the
method terminates and the same program always produces the same outcome.

Dual and Farkas multipliers are read from the reduced costs of the slack
variables and mapped back onto the program's canonical rows.
"""

from abc import abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Protocol, Tuple
import logging
import os

from src.conecert.config.settings import load_settings
from src.conecert.solver.program import (
    LinearProgram,
    LpOutcome,
    LpStatus,
    Relation,
    Sense,
    canonical_rows,
)


# Configure module logger
logger = logging.getLogger(__name__)

ZERO = Fraction(0)


class PivotLimitError(RuntimeError):
    """Raised when a simplex phase exceeds the configured pivot guard."""
    pass


class LpSolver(Protocol):
    """Protocol for exact linear programming back ends."""

    @abstractmethod
    def solve(self, lp: LinearProgram) -> LpOutcome:
        """Solve ``lp`` and return an outcome carrying its certificate."""
        ...


@dataclass
class _StandardForm:
    """The program rewritten as max c.z, A z <= b, z >= 0.

    Attributes:
        rows: Coefficient rows over the z columns
        rhs: Right-hand sides
        objective: Objective over the z columns (maximize orientation)
        objective_offset: Objective value contributed by bound shifts
        columns: Per original variable, its (column, sign) pairs
        offsets: Per original variable, the shift applied (x = offset + sum sign*z)
        row_origin: Per standard row, (canonical row index, sign)
        lower_row: Per original variable, its canonical lower-bound row or None
    """
    rows: List[List[Fraction]]
    rhs: List[Fraction]
    objective: List[Fraction]
    objective_offset: Fraction
    columns: List[List[Tuple[int, int]]]
    offsets: List[Fraction]
    row_origin: List[Tuple[int, int]]
    lower_row: List[Optional[int]]
    canonical_count: int

    @classmethod
    def from_program(cls, lp: LinearProgram) -> "_StandardForm":
        n = lp.num_variables
        columns: List[List[Tuple[int, int]]] = []
        offsets: List[Fraction] = []
        width = 0
        for i in range(n):
            if lp.lower[i] is not None:
                columns.append([(width, 1)])
                offsets.append(lp.lower[i])
                width += 1
            else:
                columns.append([(width, 1), (width + 1, -1)])
                offsets.append(ZERO)
                width += 2

        rows: List[List[Fraction]] = []
        rhs: List[Fraction] = []
        row_origin: List[Tuple[int, int]] = []

        def push(coefficients, bound, origin: int, flip: bool, weight: int) -> None:
            sign = -1 if flip else 1
            row = [ZERO] * width
            shifted = sign * Fraction(bound)
            for i, a in enumerate(coefficients):
                if a == 0:
                    continue
                a = Fraction(a) * sign
                shifted -= a * offsets[i]
                for col, s in columns[i]:
                    row[col] += a * s
            rows.append(row)
            rhs.append(shifted)
            row_origin.append((origin, weight))

        canonical = 0
        for con in lp.constraints:
            if con.relation is Relation.LE:
                push(con.coefficients, con.rhs, canonical, flip=False, weight=1)
            elif con.relation is Relation.GE:
                push(con.coefficients, con.rhs, canonical, flip=True, weight=1)
            else:
                push(con.coefficients, con.rhs, canonical, flip=False, weight=1)
                push(con.coefficients, con.rhs, canonical, flip=True, weight=-1)
            canonical += 1

        lower_row: List[Optional[int]] = []
        for i in range(n):
            if lp.lower[i] is not None:
                lower_row.append(canonical)
                canonical += 1
            else:
                lower_row.append(None)

        for i in range(n):
            if lp.upper[i] is not None:
                unit = [ZERO] * n
                unit[i] = Fraction(1)
                push(unit, lp.upper[i], canonical, flip=False, weight=1)
                canonical += 1

        maximize = lp.sense is Sense.MAXIMIZE
        objective = [ZERO] * width
        objective_offset = ZERO
        for i, c in enumerate(lp.objective):
            c = Fraction(c) if maximize else -Fraction(c)
            objective_offset += c * offsets[i]
            for col, s in columns[i]:
                objective[col] += c * s

        return cls(
            rows=rows,
            rhs=rhs,
            objective=objective,
            objective_offset=objective_offset,
            columns=columns,
            offsets=offsets,
            row_origin=row_origin,
            lower_row=lower_row,
            canonical_count=canonical,
        )

    def to_original(self, z: List[Fraction], shift: bool = True) -> Tuple[Fraction, ...]:
        """Map a z vector (point or direction) back to the original variables."""
        values = []
        for i, pairs in enumerate(self.columns):
            v = self.offsets[i] if shift else ZERO
            for col, s in pairs:
                v += s * z[col]
            values.append(v)
        return tuple(values)

    def canonical_multipliers(
        self, y: List[Fraction], with_objective: bool
    ) -> List[Fraction]:
        """Map multipliers on standard rows onto canonical rows.

        Lower-bound rows get y.A_col (minus the objective coefficient for
        optimality certificates), which is what makes the recombination exact.
        """
        result = [ZERO] * self.canonical_count
        for r, (origin, weight) in enumerate(self.row_origin):
            result[origin] += weight * y[r]
        for i, pairs in enumerate(self.columns):
            index = self.lower_row[i]
            if index is None:
                continue
            col = pairs[0][0]
            weight = sum((y[r] * row[col] for r, row in enumerate(self.rows)), ZERO)
            if with_objective:
                weight -= self.objective[col]
            result[index] = weight
        return result


class _Dictionary:
    """Simplex dictionary: x_B = b - A x_N, objective = value + c.x_N.

    Labels 0..n-1 are structural columns, n..n+m-1 the row slacks and
    n+m the first-phase auxiliary variable.
    """

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], objective: List[Fraction]):
        self.n = len(objective)
        self.m = len(rows)
        self.n_structural = self.n
        self.m_original = self.m
        self.A = [list(row) for row in rows]
        self.b = list(rhs)
        self.c = list(objective)
        self.value = ZERO
        self.nonbasis = list(range(self.n))
        self.basis = list(range(self.n, self.n + self.m))
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        row = self.A[i]
        inv = 1 / row[j]
        new_row = [a * inv for a in row]
        new_row[j] = inv
        b_i = self.b[i] * inv
        self.A[i] = new_row
        self.b[i] = b_i
        width = len(new_row)
        for k, other in enumerate(self.A):
            if k == i:
                continue
            f = other[j]
            if f == 0:
                continue
            for l in range(width):
                if l != j and new_row[l] != 0:
                    other[l] -= f * new_row[l]
            other[j] = -f * inv
            self.b[k] -= f * b_i
        f = self.c[j]
        if f != 0:
            for l in range(width):
                if l != j and new_row[l] != 0:
                    self.c[l] -= f * new_row[l]
            self.c[j] = -f * inv
            self.value += f * b_i
        self.basis[i], self.nonbasis[j] = self.nonbasis[j], self.basis[i]
        self.pivots += 1

    def entering(self) -> Optional[int]:
        """Bland: the improving nonbasic column with the smallest label."""
        best = None
        for j, c in enumerate(self.c):
            if c > 0 and (best is None or self.nonbasis[j] < self.nonbasis[best]):
                best = j
        return best

    def leaving(self, j: int) -> Optional[int]:
        """Minimum ratio row; ties go to the smallest basic label."""
        best = None
        best_key = None
        for i in range(self.m):
            a = self.A[i][j]
            if a > 0:
                key = (self.b[i] / a, self.basis[i])
                if best_key is None or key < best_key:
                    best, best_key = i, key
        return best

    def run(self, max_pivots: int, phase: str) -> Tuple[str, Optional[int]]:
        """Pivot until optimal or unbounded; returns (status, entering column)."""
        start = self.pivots
        while True:
            j = self.entering()
            if j is None:
                return "optimal", None
            i = self.leaving(j)
            if i is None:
                return "unbounded", j
            if self.pivots - start >= max_pivots:
                logger.warning(f"Pivot guard of {max_pivots} reached in {phase}")
                raise PivotLimitError(f"{phase} exceeded {max_pivots} pivots")
            self.pivot(i, j)

    def slack_duals(self) -> List[Fraction]:
        """y_i = minus the reduced cost of slack i (0 when the slack is basic)."""
        y = [ZERO] * self.m_original
        for j, label in enumerate(self.nonbasis):
            if self.n_structural <= label < self.n_structural + self.m_original:
                y[label - self.n_structural] = -self.c[j]
        return y

    def label_values(self, total: int) -> List[Fraction]:
        values = [ZERO] * total
        for i, label in enumerate(self.basis):
            if label < total:
                values[label] = self.b[i]
        return values


class BlandSimplexSolver:
    """Two-phase dictionary simplex with Bland's anti-cycling rule.

    Attributes:
        max_pivots: Pivot guard per phase
    """

    def __init__(self, max_pivots: Optional[int] = None):
        self.max_pivots = max_pivots or load_settings(env=os.environ).max_pivots

    def solve(self, lp: LinearProgram) -> LpOutcome:
        """Solve ``lp`` exactly.

        Raises:
            MalformedProgramError: If the program is not well formed
            PivotLimitError: If a phase exceeds the pivot guard
        """
        lp.validate()
        form = _StandardForm.from_program(lp)
        n = len(form.objective)
        m = len(form.rows)
        logger.debug(f"Solving program with {m} standard rows and {n} columns")

        tableau = _Dictionary(form.rows, form.rhs, [ZERO] * n)

        if any(b < 0 for b in tableau.b):
            aux = n + m
            for row in tableau.A:
                row.append(Fraction(-1))
            tableau.c.append(Fraction(-1))
            tableau.nonbasis.append(aux)
            start = min(range(m), key=lambda i: (tableau.b[i], tableau.basis[i]))
            tableau.pivot(start, len(tableau.nonbasis) - 1)
            tableau.run(self.max_pivots, "phase one")
            if tableau.value < 0:
                y = tableau.slack_duals()
                multipliers = form.canonical_multipliers(y, with_objective=False)
                total = sum(
                    (w * row.rhs for w, row in zip(multipliers, canonical_rows(lp))), ZERO
                )
                scale = -1 / total
                logger.debug(f"Infeasible after {tableau.pivots} pivots")
                return LpOutcome(
                    status=LpStatus.INFEASIBLE,
                    multipliers=tuple(w * scale for w in multipliers),
                    pivots=tableau.pivots,
                )
            self._drop_auxiliary(tableau, aux)

        self._install_objective(tableau, form.objective)
        status, column = tableau.run(self.max_pivots, "phase two")
        z = tableau.label_values(n)
        point = form.to_original(z)

        if status == "unbounded":
            direction = [ZERO] * (n + m)
            direction[tableau.nonbasis[column]] = Fraction(1)
            for i, label in enumerate(tableau.basis):
                direction[label] = -tableau.A[i][column]
            ray = form.to_original(direction[:n], shift=False)
            logger.debug(f"Unbounded after {tableau.pivots} pivots")
            return LpOutcome(
                status=LpStatus.UNBOUNDED, point=point, ray=ray, pivots=tableau.pivots
            )

        y = tableau.slack_duals()
        multipliers = form.canonical_multipliers(y, with_objective=True)
        value = sum((c * x for c, x in zip(lp.objective, point)), ZERO)
        logger.debug(f"Optimal value {value} after {tableau.pivots} pivots")
        return LpOutcome(
            status=LpStatus.OPTIMAL,
            point=point,
            value=value,
            multipliers=tuple(multipliers),
            pivots=tableau.pivots,
        )

    @staticmethod
    def _drop_auxiliary(tableau: _Dictionary, aux: int) -> None:
        if aux in tableau.basis:
            i = tableau.basis.index(aux)
            candidates = [
                j for j, label in enumerate(tableau.nonbasis)
                if label != aux and tableau.A[i][j] != 0
            ]
            if candidates:
                j = min(candidates, key=lambda j: tableau.nonbasis[j])
                tableau.pivot(i, j)
            else:
                # redundant row: the auxiliary variable depends on nothing
                del tableau.A[i]
                del tableau.b[i]
                del tableau.basis[i]
                tableau.m -= 1
        j = tableau.nonbasis.index(aux)
        for row in tableau.A:
            del row[j]
        del tableau.c[j]
        del tableau.nonbasis[j]

    @staticmethod
    def _install_objective(tableau: _Dictionary, objective: List[Fraction]) -> None:
        n = len(objective)
        value = ZERO
        c = [objective[label] if label < n else ZERO for label in tableau.nonbasis]
        for i, label in enumerate(tableau.basis):
            if label < n and objective[label] != 0:
                weight = objective[label]
                value += weight * tableau.b[i]
                row = tableau.A[i]
                for j in range(len(c)):
                    if row[j] != 0:
                        c[j] -= weight * row[j]
        tableau.c = c
        tableau.value = value


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` with the default exact simplex solver."""
    return BlandSimplexSolver().solve(lp)
