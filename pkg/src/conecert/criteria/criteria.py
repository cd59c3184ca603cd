"""Decision procedures for the no-arbitrage family of conditions.

Every "for all X in L" statement is decided by optimizing over the
coefficient polytope of the cone, so each verdict arrives with the LP
outcome that certifies it.

Requirements covered:
- No-arbitrage (NA): L contains no nonzero nonnegative payoff
- Condition (a): no member of L dominates a nonnegative nonzero payoff
- Condition (b): E_Q(X) <= k ess sup(-X), minimal k over D = {X in L: X >= -1}
- Condition (b*): E_Q(X) <= k E_Q(X-), minimal k
- Condition (b**): |E_Q(X)| <= c E_Q|X| on linear spaces, minimal c
- Condition (c): events A_n and constants k_n, constructed and verified
- Condition (d): boundedness of D (tightness on a finite space)
- Conversions between the (b*) and (b**) constants
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import ceil
from typing import Dict, List, Optional, Sequence, Tuple
import json
import logging

from src.conecert.solver import (
    LinearProgram,
    LpBuilder,
    LpOutcome,
    Relation,
    Sense,
    solve,
)
from src.conecert.space.space import (
    ConeSpec,
    FiniteProbSpace,
    Measure,
    RandomVariable,
    SpaceMismatchError,
    combine,
    density_of,
    expectation,
    is_equivalent_to_reference,
    value_decomp,
)


# Configure module logger
logger = logging.getLogger(__name__)


class PreconditionError(ValueError):
    """Raised when an operation's precondition does not hold."""
    pass


class LinearSpaceRequiredError(ValueError):
    """Raised when a linear-space-only criterion receives a convex cone."""
    pass


class ConstantOutOfRangeError(ValueError):
    """Raised when a constant lies outside the range a conversion accepts."""
    pass


class KStatus(Enum):
    """Whether a minimal constant is finite."""
    FINITE = "finite"
    INFINITE = "infinite"


def _render(X: Optional[RandomVariable]) -> Optional[List[str]]:
    return None if X is None else [str(v) for v in X.values]


@dataclass(frozen=True)
class NaReport:
    """Verdict of an arbitrage-type condition.

    Attributes:
        condition: Which condition was checked ("NA", "A" or "D")
        holds: True if the condition holds
        witness: When it fails, a member X of L with X >= 0 and X != 0
        coefficients: Combination coefficients of the witness
        program: The linear program that was solved
        outcome: Its outcome, which certifies the verdict
    """
    condition: str
    holds: bool
    witness: Optional[RandomVariable]
    coefficients: Optional[Tuple[Fraction, ...]]
    program: LinearProgram
    outcome: LpOutcome

    @property
    def report_type(self) -> str:
        return "condition"

    def to_dict(self) -> Dict[str, object]:
        return {
            "condition": self.condition,
            "holds": self.holds,
            "witness": _render(self.witness),
            "coefficients": None if self.coefficients is None else [str(c) for c in self.coefficients],
            "certificate": self.outcome.to_dict(),
        }

    def to_json(self) -> str:
        """Serialize to JSON string."""
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class KReport:
    """Minimal constant of a (b)-type condition for a fixed Q.

    Attributes:
        criterion: "b", "b*" or "b**"
        status: FINITE or INFINITE
        value: The minimal constant when finite
        payoff: A cone member attaining the constant (finite case)
        ray_payoff: A cone member along which the ratio is unbounded
        measure: The Q the condition was evaluated with
        program: The linear program that was solved
        outcome: Its outcome (optimality proof or improving ray)
    """
    criterion: str
    status: KStatus
    value: Optional[Fraction]
    payoff: Optional[RandomVariable]
    ray_payoff: Optional[RandomVariable]
    measure: Measure
    program: LinearProgram
    outcome: LpOutcome

    @property
    def is_finite(self) -> bool:
        return self.status is KStatus.FINITE

    @property
    def report_type(self) -> str:
        return "constant"

    def bounded_by(self, bound: Fraction) -> bool:
        """True if the constant is finite and at most ``bound``."""
        return self.is_finite and self.value <= bound

    def to_dict(self) -> Dict[str, object]:
        return {
            "criterion": self.criterion,
            "status": self.status.value,
            "value": None if self.value is None else str(self.value),
            "payoff": _render(self.payoff),
            "ray_payoff": _render(self.ray_payoff),
            "measure": [str(w) for w in self.measure.weights],
            "certificate": self.outcome.to_dict(),
        }

    def to_json(self) -> str:
        """Serialize to JSON string."""
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class ConditionCPair:
    """One (A_n, k_n) pair of condition (c).

    Attributes:
        index: n
        atoms: The event A_n as atom labels
        constant: k_n
    """
    index: int
    atoms: Tuple[str, ...]
    constant: Fraction


def _check_space(space: FiniteProbSpace, cone: ConeSpec) -> None:
    if not space.same_atoms(cone.space):
        raise SpaceMismatchError("Cone and space live on different atoms")


def _check_equivalent(space: FiniteProbSpace, Q: Measure) -> None:
    if not space.same_atoms(Q.space):
        raise SpaceMismatchError("Measure and space live on different atoms")
    if not is_equivalent_to_reference(Q):
        raise PreconditionError("Q must be equivalent to the reference measure")


def add_coefficients(builder: LpBuilder, cone: ConeSpec) -> List[int]:
    """Add one combination coefficient per generator (free for linear spaces)."""
    lower = None if cone.is_linear else 0
    return [builder.add_variable(f"lambda[{name}]", lower=lower) for name in cone.names]


def payoff_terms(cone: ConeSpec, coefficients: Sequence[int], atom: int) -> Dict[int, Fraction]:
    """Row terms expressing X(atom) in the coefficient variables."""
    return {
        var: generator.values[atom]
        for var, generator in zip(coefficients, cone.generators)
        if generator.values[atom] != 0
    }


def expectation_terms(
    cone: ConeSpec, coefficients: Sequence[int], Q: Measure
) -> Dict[int, Fraction]:
    """Objective terms expressing E_Q(X) in the coefficient variables."""
    return {var: expectation(Q, generator) for var, generator in zip(coefficients, cone.generators)}


def _member(cone: ConeSpec, point: Sequence[Fraction], coefficients: Sequence[int]) -> RandomVariable:
    return combine(cone, [point[var] for var in coefficients])


def check_na(space: FiniteProbSpace, cone: ConeSpec) -> NaReport:
    """Decide (NA): no X in L with X >= 0 and X != 0.

    Maximizes the total mass sum_w X(w) over X in L with X >= 0 and total
    mass at most 1; the condition holds iff the optimum is 0.
    """
    _check_space(space, cone)
    builder = LpBuilder(Sense.MAXIMIZE)
    lam = add_coefficients(builder, cone)
    total: Dict[int, Fraction] = {}
    for w in range(space.size):
        terms = payoff_terms(cone, lam, w)
        builder.add_constraint(terms, Relation.GE, 0, name=f"nonnegative[{space.atoms[w]}]")
        for var, a in terms.items():
            total[var] = total.get(var, Fraction(0)) + a
    builder.add_constraint(total, Relation.LE, 1, name="mass")
    builder.set_objective(total)
    program = builder.build()
    outcome = solve(program)

    holds = outcome.value == 0
    witness = coefficients = None
    if not holds:
        coefficients = tuple(outcome.point[var] for var in lam)
        witness = _member(cone, outcome.point, lam)
    logger.info(f"NA {'holds' if holds else 'fails'} for {cone.dimension} generators")
    return NaReport("NA", holds, witness, coefficients, program, outcome)


def check_condition_a(space: FiniteProbSpace, cone: ConeSpec) -> NaReport:
    """Decide (a): no X in L with X >= Z atomwise for a nonnegative nonzero Z.

    On a finite space L - L_inf^+ is polyhedral and therefore closed, so the
    closure in (a) is the set itself.
    """
    _check_space(space, cone)
    builder = LpBuilder(Sense.MAXIMIZE)
    lam = add_coefficients(builder, cone)
    dominated = builder.add_variables("z", space.size, lower=0)
    for w in range(space.size):
        terms = payoff_terms(cone, lam, w)
        terms[dominated[w]] = Fraction(-1)
        builder.add_constraint(terms, Relation.GE, 0, name=f"dominates[{space.atoms[w]}]")
    builder.add_constraint({z: 1 for z in dominated}, Relation.LE, 1, name="mass")
    builder.set_objective({z: 1 for z in dominated})
    program = builder.build()
    outcome = solve(program)

    holds = outcome.value == 0
    witness = coefficients = None
    if not holds:
        coefficients = tuple(outcome.point[var] for var in lam)
        witness = _member(cone, outcome.point, lam)
    logger.info(f"Condition (a) {'holds' if holds else 'fails'}")
    return NaReport("A", holds, witness, coefficients, program, outcome)


def check_condition_d(space: FiniteProbSpace, cone: ConeSpec) -> NaReport:
    """Decide (d): the set D = {X in L : X >= -1} is bounded.

    Maximizes the total mass of X over D. The program is unbounded exactly
    when the recession cone L with X >= 0 has a nonzero member, and the
    improving ray is that member.
    """
    _check_space(space, cone)
    builder = LpBuilder(Sense.MAXIMIZE)
    lam = add_coefficients(builder, cone)
    total: Dict[int, Fraction] = {}
    for w in range(space.size):
        terms = payoff_terms(cone, lam, w)
        builder.add_constraint(terms, Relation.GE, -1, name=f"floor[{space.atoms[w]}]")
        for var, a in terms.items():
            total[var] = total.get(var, Fraction(0)) + a
    builder.set_objective(total)
    program = builder.build()
    outcome = solve(program)

    holds = not outcome.is_unbounded
    witness = coefficients = None
    if not holds:
        coefficients = tuple(outcome.ray[var] for var in lam)
        witness = _member(cone, outcome.ray, lam)
    logger.info(f"Condition (d) {'holds' if holds else 'fails'}")
    return NaReport("D", holds, witness, coefficients, program, outcome)


# On a finite space no-arbitrage of the first kind is exactly condition (d).
check_no_arbitrage_first_kind = check_condition_d


def _k_report(
    criterion: str,
    cone: ConeSpec,
    Q: Measure,
    lam: List[int],
    program: LinearProgram,
    outcome: LpOutcome,
) -> KReport:
    if outcome.is_unbounded:
        logger.info(f"Minimal ({criterion}) constant is infinite")
        return KReport(
            criterion=criterion,
            status=KStatus.INFINITE,
            value=None,
            payoff=None,
            ray_payoff=_member(cone, outcome.ray, lam),
            measure=Q,
            program=program,
            outcome=outcome,
        )
    logger.info(f"Minimal ({criterion}) constant is {outcome.value}")
    return KReport(
        criterion=criterion,
        status=KStatus.FINITE,
        value=outcome.value,
        payoff=_member(cone, outcome.point, lam),
        ray_payoff=None,
        measure=Q,
        program=program,
        outcome=outcome,
    )


def min_k_b_star(space: FiniteProbSpace, cone: ConeSpec, Q: Measure) -> KReport:
    """Minimal k with E_Q(X) <= k E_Q(X-) for every X in L.

    Epigraph form: maximize E_Q(X) over X in L and s >= 0 with s >= -X and
    sum_w Q(w) s(w) <= 1. Any slack in s only spends budget, so at an
    optimum s = X- wherever the budget row binds; by positive homogeneity
    the optimum is the supremum of E_Q(X)/E_Q(X-), clipped below at 0 by
    X = 0. An unbounded program means some X >= 0 has E_Q(X) > 0.

    Raises:
        PreconditionError: If Q is not equivalent to P0
    """
    _check_space(space, cone)
    _check_equivalent(space, Q)
    builder = LpBuilder(Sense.MAXIMIZE)
    lam = add_coefficients(builder, cone)
    epigraph = [builder.add_variable(f"s[{a}]", lower=0) for a in space.atoms]
    for w in range(space.size):
        terms = payoff_terms(cone, lam, w)
        terms[epigraph[w]] = Fraction(1)
        builder.add_constraint(terms, Relation.GE, 0, name=f"negative_part[{space.atoms[w]}]")
    builder.add_constraint(
        {s: q for s, q in zip(epigraph, Q.weights)}, Relation.LE, 1, name="budget"
    )
    builder.set_objective(expectation_terms(cone, lam, Q))
    program = builder.build()
    return _k_report("b*", cone, Q, lam, program, solve(program))


def min_k_b(space: FiniteProbSpace, cone: ConeSpec, Q: Measure) -> KReport:
    """Minimal k with E_Q(X) <= k ess sup(-X) for every X in L.

    Equals max E_Q(X) over D = {X in L : X >= -1}; infinite iff D admits an
    improving ray.

    Raises:
        PreconditionError: If Q is not equivalent to P0
    """
    _check_space(space, cone)
    _check_equivalent(space, Q)
    builder = LpBuilder(Sense.MAXIMIZE)
    lam = add_coefficients(builder, cone)
    for w in range(space.size):
        builder.add_constraint(
            payoff_terms(cone, lam, w), Relation.GE, -1, name=f"floor[{space.atoms[w]}]"
        )
    builder.set_objective(expectation_terms(cone, lam, Q))
    program = builder.build()
    return _k_report("b", cone, Q, lam, program, solve(program))


def c_min_b_star_star(space: FiniteProbSpace, cone: ConeSpec, Q: Measure) -> KReport:
    """Minimal c with |E_Q(X)| <= c E_Q|X| on a linear space.

    Two epigraph programs, maximizing +E_Q(X) and -E_Q(X) subject to
    u >= X, u >= -X and sum_w Q(w) u(w) <= 1. As with (b*), slack in u only
    spends budget. The value is at most 1, so the status is always FINITE.

    Raises:
        LinearSpaceRequiredError: If the cone is not a linear space
        PreconditionError: If Q is not equivalent to P0
    """
    _check_space(space, cone)
    if not cone.is_linear:
        raise LinearSpaceRequiredError("Condition (b**) is defined for linear spaces only")
    _check_equivalent(space, Q)

    best: Optional[Tuple[LinearProgram, LpOutcome, List[int]]] = None
    for direction in (1, -1):
        builder = LpBuilder(Sense.MAXIMIZE)
        lam = add_coefficients(builder, cone)
        envelope = [builder.add_variable(f"u[{a}]", lower=0) for a in space.atoms]
        for w in range(space.size):
            terms = payoff_terms(cone, lam, w)
            upper = {var: -a for var, a in terms.items()}
            upper[envelope[w]] = Fraction(1)
            builder.add_constraint(upper, Relation.GE, 0, name=f"above[{space.atoms[w]}]")
            lower = dict(terms)
            lower[envelope[w]] = Fraction(1)
            builder.add_constraint(lower, Relation.GE, 0, name=f"below[{space.atoms[w]}]")
        builder.add_constraint(
            {u: q for u, q in zip(envelope, Q.weights)}, Relation.LE, 1, name="budget"
        )
        builder.set_objective(
            {var: direction * e for var, e in expectation_terms(cone, lam, Q).items()}
        )
        program = builder.build()
        outcome = solve(program)
        if best is None or outcome.value > best[1].value:
            best = (program, outcome, lam)

    program, outcome, lam = best
    return _k_report("b**", cone, Q, lam, program, outcome)


def convert_k_to_c(k: Fraction) -> Fraction:
    """c = k/(k+2): the (b**) constant implied by a (b*) constant.

    Raises:
        ConstantOutOfRangeError: If k < 0
    """
    k = Fraction(k)
    if k < 0:
        raise ConstantOutOfRangeError(f"k must be nonnegative, got {k}")
    return k / (k + 2)


def convert_c_to_k(c: Fraction) -> Fraction:
    """k = 2c/(1-c): the (b*) constant implied by a (b**) constant.

    Raises:
        ConstantOutOfRangeError: Unless 0 <= c < 1
    """
    c = Fraction(c)
    if c < 0 or c >= 1:
        raise ConstantOutOfRangeError(f"c must satisfy 0 <= c < 1, got {c}")
    return 2 * c / (1 - c)


def build_condition_c(
    space: FiniteProbSpace,
    cone: ConeSpec,
    Q: Measure,
    k: Fraction,
    count: Optional[int] = None,
) -> List[ConditionCPair]:
    """Events A_n = {n f >= 1} and constants k_n = n(k+1), f = dQ/dP0.

    Args:
        space: The finite space
        cone: The cone L
        Q: A measure equivalent to P0 for which condition (b) holds with k
        k: A (b) constant for Q
        count: Number of pairs; defaults to the first n with A_n equal to
            the whole space

    Raises:
        PreconditionError: If Q is not equivalent to P0 or minK_b(Q) > k
    """
    k = Fraction(k)
    _check_space(space, cone)
    _check_equivalent(space, Q)
    if k < 0:
        raise PreconditionError(f"k must be nonnegative, got {k}")
    report = min_k_b(space, cone, Q)
    if not report.bounded_by(k):
        shown = "infinite" if not report.is_finite else str(report.value)
        raise PreconditionError(f"Condition (b) needs k >= {shown}, got {k}")

    f = density_of(Q, space.reference_measure())
    saturation = ceil(1 / min(f.values))
    count = saturation if count is None else count
    if count < 1:
        raise PreconditionError(f"count must be positive, got {count}")
    pairs = [
        ConditionCPair(
            index=n,
            atoms=tuple(a for a, value in zip(space.atoms, f.values) if n * value >= 1),
            constant=n * (k + 1),
        )
        for n in range(1, count + 1)
    ]
    logger.debug(f"Built {len(pairs)} condition (c) pairs; A_n is the whole space from n = {saturation}")
    return pairs


def has_strictly_positive_member(space: FiniteProbSpace, cone: ConeSpec) -> bool:
    """True if some X in L is strictly positive on every atom."""
    _check_space(space, cone)
    builder = LpBuilder(Sense.MAXIMIZE)
    lam = add_coefficients(builder, cone)
    for w in range(space.size):
        builder.add_constraint(payoff_terms(cone, lam, w), Relation.GE, 1)
    return not solve(builder.build()).is_infeasible


def verify_condition_c(
    space: FiniteProbSpace, cone: ConeSpec, pairs: Sequence[ConditionCPair]
) -> bool:
    """Check E_P0(X I_{A_n}) <= k_n ess sup(-X) for every X in L and every pair.

    Per pair, maximizes E_P0(X I_{A_n}) over D = {X in L : X >= -1}. A
    strictly positive member of L makes ess sup(-X) negative, which breaks
    the inequality whenever k_n > 0 regardless of A_n.
    """
    _check_space(space, cone)
    if not pairs:
        return True
    reference = space.reference_measure()
    positive_member = has_strictly_positive_member(space, cone)
    for pair in pairs:
        if positive_member and pair.constant > 0:
            logger.info(f"Condition (c) fails at n = {pair.index}: strictly positive payoff")
            return False
        restricted = cone.with_generators(
            [g * space.indicator(pair.atoms) for g in cone.generators]
        )
        builder = LpBuilder(Sense.MAXIMIZE)
        lam = add_coefficients(builder, cone)
        for w in range(space.size):
            builder.add_constraint(payoff_terms(cone, lam, w), Relation.GE, -1)
        builder.set_objective(expectation_terms(restricted, lam, reference))
        outcome = solve(builder.build())
        if outcome.is_unbounded or outcome.value > pair.constant:
            logger.info(f"Condition (c) fails at n = {pair.index}")
            return False
    return True


def floor_bound_holds(space: FiniteProbSpace, cone: ConeSpec, r: Fraction) -> bool:
    """For an ESM P >= r P0: check E_P0(X) <= (1/r) ess sup(-X) on all of L."""
    r = Fraction(r)
    if r <= 0:
        raise PreconditionError(f"r must be positive, got {r}")
    return min_k_b(space, cone, space.reference_measure()).bounded_by(1 / r)


def band_ratio_bound_holds(
    space: FiniteProbSpace, cone: ConeSpec, r: Fraction, s: Fraction
) -> bool:
    """For an ESM with r P0 <= P <= s P0: check E_P0(X) <= (s/r) E_P0(X-).

    Checked on every generator and, through the (b*) program, on the
    maximizing member of L.
    """
    r, s = Fraction(r), Fraction(s)
    if r <= 0 or s < r:
        raise PreconditionError(f"Need 0 < r <= s, got r = {r}, s = {s}")
    reference = space.reference_measure()
    ratio = s / r
    for generator in cone.generators:
        _, negative = value_decomp(generator)
        if expectation(reference, generator) > ratio * expectation(reference, negative):
            return False
    return min_k_b_star(space, cone, reference).bounded_by(ratio)
