"""Linear program and outcome types for the exact solver.

A program is a list of rows (coefficients, relation, right-hand side) plus
optional per-variable bounds. Certificates are expressed over the program's
canonical rows: the constraint rows first, then one row per finite lower
bound, then one row per finite upper bound, every row read as "a.x <= b"
(a ">=" row is negated, an "=" row keeps its own orientation).
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union


Scalar = Union[int, Fraction]


class MalformedProgramError(ValueError):
    """Raised when a linear program is not well formed."""
    pass


class Relation(Enum):
    """Relation between a row's left- and right-hand sides."""
    LE = "<="
    EQ = "="
    GE = ">="


class Sense(Enum):
    """Optimization direction."""
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class LpStatus(Enum):
    """Outcome status of a solve."""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _exact(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise MalformedProgramError(f"{where}: expected an exact rational, got {value!r}")
    return Fraction(value)


@dataclass(frozen=True)
class Constraint:
    """One row of a linear program.

    Attributes:
        coefficients: One coefficient per variable
        relation: <=, = or >=
        rhs: Right-hand side
        name: Optional label used in certificates and reports
    """
    coefficients: Tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction
    name: str = ""


@dataclass(frozen=True)
class LinearProgram:
    """An exact linear program.

    Variables default to a lower bound of 0 and no upper bound. A lower
    bound of None makes the variable free.

    Attributes:
        objective: One objective coefficient per variable
        constraints: The rows
        sense: Maximize or minimize
        lower: Lower bound per variable (None = unbounded below)
        upper: Upper bound per variable (None = unbounded above)
        variable_names: Display name per variable
    """
    objective: Tuple[Fraction, ...]
    constraints: Tuple[Constraint, ...] = ()
    sense: Sense = Sense.MAXIMIZE
    lower: Tuple[Optional[Fraction], ...] = ()
    upper: Tuple[Optional[Fraction], ...] = ()
    variable_names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.objective)
        object.__setattr__(
            self, "objective", tuple(_exact(c, "objective") for c in self.objective)
        )
        object.__setattr__(
            self,
            "lower",
            tuple(None if v is None else _exact(v, "lower bound") for v in self.lower)
            or tuple(Fraction(0) for _ in range(n)),
        )
        object.__setattr__(
            self,
            "upper",
            tuple(None if v is None else _exact(v, "upper bound") for v in self.upper)
            or tuple(None for _ in range(n)),
        )
        object.__setattr__(
            self, "variable_names", tuple(self.variable_names) or tuple(f"x{i}" for i in range(n))
        )
        object.__setattr__(self, "constraints", tuple(self.constraints))
        self.validate()

    @property
    def num_variables(self) -> int:
        return len(self.objective)

    def validate(self) -> None:
        """Check shapes and types.

        Raises:
            MalformedProgramError: On any width mismatch or inexact coefficient
        """
        n = self.num_variables
        if not isinstance(self.sense, Sense):
            raise MalformedProgramError(f"Unknown sense: {self.sense!r}")
        for label, seq in (("lower", self.lower), ("upper", self.upper), ("names", self.variable_names)):
            if len(seq) != n:
                raise MalformedProgramError(f"Expected {n} {label} entries, got {len(seq)}")
        for r, row in enumerate(self.constraints):
            if not isinstance(row, Constraint):
                raise MalformedProgramError(f"Row {r} is not a Constraint")
            if not isinstance(row.relation, Relation):
                raise MalformedProgramError(f"Row {r} has an unknown relation {row.relation!r}")
            if len(row.coefficients) != n:
                raise MalformedProgramError(
                    f"Row {r} has {len(row.coefficients)} coefficients for {n} variables"
                )
            for c in row.coefficients:
                _exact(c, f"row {r}")
            _exact(row.rhs, f"row {r} right-hand side")


@dataclass(frozen=True)
class CanonicalRow:
    """A row of the certificate system, in "a.x <= b" form.

    Attributes:
        coefficients: Row coefficients
        rhs: Right-hand side
        is_equality: True if the row holds with equality (free multiplier)
        source: Where the row came from ("row:<name>", "lower:<var>", "upper:<var>")
    """
    coefficients: Tuple[Fraction, ...]
    rhs: Fraction
    is_equality: bool
    source: str


def canonical_rows(lp: LinearProgram) -> List[CanonicalRow]:
    """The rows certificates are expressed over, in their fixed order."""
    n = lp.num_variables
    rows: List[CanonicalRow] = []
    for r, con in enumerate(lp.constraints):
        coefficients = tuple(Fraction(c) for c in con.coefficients)
        rhs = Fraction(con.rhs)
        if con.relation is Relation.GE:
            coefficients = tuple(-c for c in coefficients)
            rhs = -rhs
        rows.append(
            CanonicalRow(
                coefficients=coefficients,
                rhs=rhs,
                is_equality=con.relation is Relation.EQ,
                source=f"row:{con.name or r}",
            )
        )
    for i, bound in enumerate(lp.lower):
        if bound is not None:
            coefficients = tuple(Fraction(-1) if k == i else Fraction(0) for k in range(n))
            rows.append(CanonicalRow(coefficients, -bound, False, f"lower:{lp.variable_names[i]}"))
    for i, bound in enumerate(lp.upper):
        if bound is not None:
            coefficients = tuple(Fraction(1) if k == i else Fraction(0) for k in range(n))
            rows.append(CanonicalRow(coefficients, bound, False, f"upper:{lp.variable_names[i]}"))
    return rows


@dataclass(frozen=True)
class LpOutcome:
    """Result of a solve, with the certificate for its status.

    On OPTIMAL, ``point`` and ``value`` are set and ``multipliers`` holds
    dual weights over the canonical rows that recombine to the objective
    (read in the maximize orientation). On INFEASIBLE, ``multipliers``
    recombine the canonical rows to "0 <= -1". On UNBOUNDED, ``point`` is
    feasible and ``ray`` is an improving recession direction.

    Attributes:
        status: Optimal, infeasible or unbounded
        point: Feasible point (optimal and unbounded outcomes)
        value: Optimal objective value
        multipliers: Dual or Farkas weights, one per canonical row
        ray: Improving recession direction (unbounded outcomes)
        pivots: Number of simplex pivots performed
    """
    status: LpStatus
    point: Optional[Tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    multipliers: Optional[Tuple[Fraction, ...]] = None
    ray: Optional[Tuple[Fraction, ...]] = None
    pivots: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL

    @property
    def is_infeasible(self) -> bool:
        return self.status is LpStatus.INFEASIBLE

    @property
    def is_unbounded(self) -> bool:
        return self.status is LpStatus.UNBOUNDED

    def to_dict(self) -> Dict[str, object]:
        """Plain representation with rationals as exact strings."""
        def render(seq):
            return None if seq is None else [str(v) for v in seq]

        return {
            "status": self.status.value,
            "point": render(self.point),
            "value": None if self.value is None else str(self.value),
            "multipliers": render(self.multipliers),
            "ray": render(self.ray),
        }


class LpBuilder:
    """Assemble a LinearProgram by named variables.

    Example:
        builder = LpBuilder()
        x = builder.add_variable("x", upper=Fraction(3))
        builder.set_objective({x: 1})
        lp = builder.build()
    """

    def __init__(self, sense: Sense = Sense.MAXIMIZE):
        self._sense = sense
        self._names: List[str] = []
        self._lower: List[Optional[Fraction]] = []
        self._upper: List[Optional[Fraction]] = []
        self._objective: Dict[int, Fraction] = {}
        self._rows: List[Tuple[Dict[int, Fraction], Relation, Fraction, str]] = []

    @property
    def num_variables(self) -> int:
        return len(self._names)

    def add_variable(
        self,
        name: str,
        lower: Optional[Scalar] = 0,
        upper: Optional[Scalar] = None,
    ) -> int:
        """Add a variable and return its index."""
        self._names.append(name)
        self._lower.append(None if lower is None else Fraction(lower))
        self._upper.append(None if upper is None else Fraction(upper))
        return len(self._names) - 1

    def add_variables(
        self,
        prefix: str,
        count: int,
        lower: Optional[Scalar] = 0,
        upper: Optional[Scalar] = None,
    ) -> List[int]:
        return [self.add_variable(f"{prefix}{k}", lower, upper) for k in range(count)]

    def set_objective(self, terms: Mapping[int, Scalar]) -> None:
        self._objective = {i: Fraction(c) for i, c in terms.items()}

    def add_constraint(
        self,
        terms: Mapping[int, Scalar],
        relation: Relation,
        rhs: Scalar,
        name: str = "",
    ) -> int:
        """Add a row and return its index."""
        self._rows.append(({i: Fraction(c) for i, c in terms.items()}, relation, Fraction(rhs), name))
        return len(self._rows) - 1

    def build(self) -> LinearProgram:
        n = len(self._names)

        def dense(terms: Mapping[int, Fraction]) -> Tuple[Fraction, ...]:
            values = [Fraction(0)] * n
            for i, c in terms.items():
                if not 0 <= i < n:
                    raise MalformedProgramError(f"Unknown variable index {i}")
                values[i] += c
            return tuple(values)

        return LinearProgram(
            objective=dense(self._objective),
            constraints=tuple(
                Constraint(coefficients=dense(terms), relation=rel, rhs=rhs, name=name)
                for terms, rel, rhs, name in self._rows
            ),
            sense=self._sense,
            lower=tuple(self._lower),
            upper=tuple(self._upper),
            variable_names=tuple(self._names),
        )
