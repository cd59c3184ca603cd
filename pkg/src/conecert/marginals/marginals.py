"""Equivalent couplings with prescribed marginals.

A measure P on a finite product with marginals T1 and T2 is exactly a
supermartingale measure for the linear space spanned by the centred row
and column indicators, so the coupling question is answered both directly
(by a max-floor program over the support cells) and through that linear
space.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple, Union
import logging

from src.conecert.construct.construct import MeasureCertificate
from src.conecert.criteria.criteria import KReport, c_min_b_star_star
from src.conecert.solver import LpBuilder, Relation, Sense, solve
from src.conecert.space.space import (
    ConeKind,
    ConeSpec,
    FiniteProbSpace,
    Measure,
    density_of,
)


# Configure module logger
logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


class ProductSpaceError(ValueError):
    """Raised when a product space or marginal pair is inconsistent."""
    pass


def cell_label(row: str, col: str) -> str:
    return f"{row},{col}"


@dataclass(frozen=True)
class ProductSpace:
    """Finite product Omega1 x Omega2 with a joint reference probability.

    Cells with zero joint weight are not atoms of ``space``; any measure
    equivalent to P0 must vanish on them.

    Attributes:
        rows: Labels of Omega1
        cols: Labels of Omega2
        cells: Support cells as (row, col), row-major
        space: The finite space over the support cells
    """
    rows: Tuple[str, ...]
    cols: Tuple[str, ...]
    cells: Tuple[Tuple[str, str], ...]
    space: FiniteProbSpace

    @classmethod
    def from_cells(
        cls,
        rows: Sequence[str],
        cols: Sequence[str],
        weights: Mapping[Tuple[str, str], Scalar],
    ) -> "ProductSpace":
        """Build from a (row, col) -> weight mapping; zero cells are dropped.

        Raises:
            ProductSpaceError: On unknown labels or negative weights
            InvalidSpaceError: If the weights do not sum to 1
        """
        rows, cols = tuple(rows), tuple(cols)
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ProductSpaceError("Row and column labels must be distinct")
        for (a, b), w in weights.items():
            if a not in rows or b not in cols:
                raise ProductSpaceError(f"Cell ({a}, {b}) is outside the product")
            if Fraction(w) < 0:
                raise ProductSpaceError(f"Cell ({a}, {b}) has negative weight")
        cells = tuple(
            (a, b) for a in rows for b in cols if Fraction(weights.get((a, b), 0)) > 0
        )
        space = FiniteProbSpace(
            atoms=tuple(cell_label(a, b) for a, b in cells),
            weights=tuple(Fraction(weights[cell]) for cell in cells),
        )
        return cls(rows=rows, cols=cols, cells=cells, space=space)

    @classmethod
    def from_matrix(
        cls,
        rows: Sequence[str],
        cols: Sequence[str],
        joint: Sequence[Sequence[Scalar]],
    ) -> "ProductSpace":
        """Build from a joint weight matrix indexed [row][col]."""
        if len(joint) != len(rows) or any(len(line) != len(cols) for line in joint):
            raise ProductSpaceError("Joint matrix shape does not match the labels")
        return cls.from_cells(
            rows,
            cols,
            {(a, b): joint[i][j] for i, a in enumerate(rows) for j, b in enumerate(cols)},
        )

    def row_space(self) -> FiniteProbSpace:
        """Omega1 as an atom container (uniform reference weights)."""
        return FiniteProbSpace.uniform(self.rows)

    def col_space(self) -> FiniteProbSpace:
        """Omega2 as an atom container (uniform reference weights)."""
        return FiniteProbSpace.uniform(self.cols)

    def marginals_of(self, P: Measure) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
        """Row and column sums of a measure on the support cells."""
        first = {a: Fraction(0) for a in self.rows}
        second = {b: Fraction(0) for b in self.cols}
        for (a, b), w in zip(self.cells, P.weights):
            first[a] += w
            second[b] += w
        return tuple(first[a] for a in self.rows), tuple(second[b] for b in self.cols)

    def as_matrix(self, P: Measure) -> List[List[Fraction]]:
        """Weights of P laid out [row][col], zero off the support."""
        lookup = dict(zip(self.cells, P.weights))
        return [[lookup.get((a, b), Fraction(0)) for b in self.cols] for a in self.rows]


@dataclass(frozen=True)
class MarginalPair:
    """Prescribed marginals.

    Attributes:
        first: T1 on the row labels
        second: T2 on the column labels
    """
    first: Measure
    second: Measure

    @classmethod
    def from_weights(
        cls, ps: ProductSpace, first: Sequence[Scalar], second: Sequence[Scalar]
    ) -> "MarginalPair":
        return cls(
            first=Measure(space=ps.row_space(), weights=tuple(first)),
            second=Measure(space=ps.col_space(), weights=tuple(second)),
        )


def _check_pair(ps: ProductSpace, m: MarginalPair) -> None:
    if m.first.space.atoms != ps.rows or m.second.space.atoms != ps.cols:
        raise ProductSpaceError("Marginals are not indexed by the product's labels")


def build_marginal_cone(ps: ProductSpace, m: MarginalPair) -> ConeSpec:
    """Linear space spanned by I{row=a} - T1(a) and I{col=b} - T2(b)."""
    _check_pair(ps, m)
    generators = []
    names = []
    for a, t in zip(ps.rows, m.first.weights):
        atoms = [cell_label(r, c) for r, c in ps.cells if r == a]
        generators.append(ps.space.indicator(atoms) - t)
        names.append(f"row[{a}]")
    for b, t in zip(ps.cols, m.second.weights):
        atoms = [cell_label(r, c) for r, c in ps.cells if c == b]
        generators.append(ps.space.indicator(atoms) - t)
        names.append(f"col[{b}]")
    return ConeSpec(
        space=ps.space, generators=tuple(generators), kind=ConeKind.LINEAR, names=tuple(names)
    )


def _marginal_rows(
    builder: LpBuilder,
    ps: ProductSpace,
    m: MarginalPair,
    weights: Sequence[int],
    scale: Union[int, None] = None,
) -> None:
    """Row sums equal T1 and column sums equal T2 (times ``scale`` when given)."""
    for a, t in zip(ps.rows, m.first.weights):
        terms: Dict[int, Fraction] = {
            var: Fraction(1) for var, (r, _) in zip(weights, ps.cells) if r == a
        }
        if scale is None:
            builder.add_constraint(terms, Relation.EQ, t, name=f"row[{a}]")
        else:
            terms[scale] = -t
            builder.add_constraint(terms, Relation.EQ, 0, name=f"row[{a}]")
    for b, t in zip(ps.cols, m.second.weights):
        terms = {var: Fraction(1) for var, (_, c) in zip(weights, ps.cells) if c == b}
        if scale is None:
            builder.add_constraint(terms, Relation.EQ, t, name=f"col[{b}]")
        else:
            terms[scale] = -t
            builder.add_constraint(terms, Relation.EQ, 0, name=f"col[{b}]")


def couple_with_marginals(ps: ProductSpace, m: MarginalPair) -> MeasureCertificate:
    """An equivalent coupling of T1 and T2, or a proof that none exists.

    Maximizes tau subject to P >= tau P0 on the support cells and the
    marginal rows. When the optimum is not positive, the scaled system
    P >= P0, row sums = sigma T1, column sums = sigma T2 is solved; it is
    feasible exactly when an equivalent coupling exists, so its Farkas
    multipliers certify the failure.
    """
    _check_pair(ps, m)
    space = ps.space
    builder = LpBuilder(Sense.MAXIMIZE)
    weights = [builder.add_variable(f"P[{a}]") for a in space.atoms]
    tau = builder.add_variable("tau")
    for var, a, p0 in zip(weights, space.atoms, space.weights):
        builder.add_constraint({var: 1, tau: -p0}, Relation.GE, 0, name=f"floor[{a}]")
    _marginal_rows(builder, ps, m, weights)
    builder.set_objective({tau: 1})
    program = builder.build()
    outcome = solve(program)

    if outcome.is_optimal and outcome.value > 0:
        measure = Measure(space=space, weights=tuple(outcome.point[var] for var in weights))
        f = density_of(measure, space.reference_measure())
        logger.info(f"Equivalent coupling found, tau = {outcome.value}")
        return MeasureCertificate(
            problem="coupling", found=True, measure=measure, tau=outcome.value, partial=None,
            floor_ratio=min(f.values), ceiling_ratio=max(f.values),
            program=program, outcome=outcome,
        )

    scaled = LpBuilder(Sense.MAXIMIZE)
    cells = [scaled.add_variable(f"P[{a}]", lower=p0) for a, p0 in zip(space.atoms, space.weights)]
    sigma = scaled.add_variable("sigma")
    _marginal_rows(scaled, ps, m, cells, scale=sigma)
    strict = scaled.build()
    obstruction = solve(strict)
    partial = None
    if outcome.is_optimal:
        partial = Measure(space=space, weights=tuple(outcome.point[var] for var in weights))
    logger.info("No equivalent coupling with the prescribed marginals")
    return MeasureCertificate(
        problem="coupling", found=False, measure=None,
        tau=outcome.value if outcome.is_optimal else None, partial=partial,
        floor_ratio=None, ceiling_ratio=None, program=program, outcome=outcome,
        obstruction_program=strict, obstruction=obstruction,
    )


def evaluate_inf_criterion(ps: ProductSpace, m: MarginalPair, Q: Measure) -> KReport:
    """sup |E_Q(X)|/E_Q|X| over the marginal linear space; below 1 certifies a coupling."""
    return c_min_b_star_star(ps.space, build_marginal_cone(ps, m), Q)
