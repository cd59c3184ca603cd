"""Construction of the measures whose existence the criteria assert.

Requirements covered:
- Single-payoff density with t = k + 1 and its exact expectation identity
- The band K = {P : Q/t <= P <= t Q} and an ESM found inside it
- ESMs by floor-ratio maximization, with a Farkas proof when none exists
- Supermartingale measures with a floor P >= r P0
- Rescaling a cone by a dominating variable, deflation and inflation, and
  the ESM search run through the rescaled cone
- The dominating-variable construction Y = 1 + sum_n Y_n/(2^n a_n)
- Recovery of the mixture component P1 from P = (Q + k P1)/(1 + k)
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple
import json
import logging

from src.conecert.criteria.criteria import PreconditionError
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
    NegativeParameterError,
    RandomVariable,
    SpaceMismatchError,
    density_of,
    expectation,
    is_equivalent_to_reference,
    normalized_measure,
    value_decomp,
)


# Configure module logger
logger = logging.getLogger(__name__)

ZERO = Fraction(0)


class DensityPreconditionError(ValueError):
    """Raised when E_Q(X) <= k E_Q(X-) fails for the single-payoff density."""
    pass


class DominationError(ValueError):
    """Raised when a rescaling variable is below 1 or an input variable is negative."""
    pass


class MixtureRecoveryError(ValueError):
    """Raised when P cannot be written as (Q + k P1)/(1 + k) with P1 a measure."""
    pass


@dataclass(frozen=True)
class BandSpec:
    """The band K = {P : (1/t) Q <= P <= t Q} around Q.

    Attributes:
        center: The measure Q
        t: Band width, t = k + 1
    """
    center: Measure
    t: Fraction

    @classmethod
    def from_constant(cls, Q: Measure, k: Fraction) -> "BandSpec":
        k = Fraction(k)
        if k < 0:
            raise NegativeParameterError(f"k must be nonnegative, got {k}")
        return cls(center=Q, t=k + 1)

    @property
    def k(self) -> Fraction:
        return self.t - 1

    def lower(self, atom: int) -> Fraction:
        return self.center.weights[atom] / self.t

    def upper(self, atom: int) -> Fraction:
        return self.center.weights[atom] * self.t

    def contains(self, P: Measure) -> bool:
        return all(
            self.lower(w) <= p <= self.upper(w) for w, p in enumerate(P.weights)
        )

    def reference_ratios(self) -> Tuple[Fraction, Fraction]:
        """(r, s) with r P0 <= P <= s P0 for every P in the band."""
        f = density_of(self.center, self.center.space.reference_measure())
        return min(f.values) / self.t, max(f.values) * self.t


@dataclass(frozen=True)
class MeasureCertificate:
    """Answer to a "does such a measure exist" question.

    Attributes:
        problem: Which construction produced it ("band", "esm", "floor", "coupling")
        found: True if a measure with the required properties exists
        measure: The measure when found
        tau: Optimal floor ratio for max-floor programs
        partial: When no equivalent measure exists, an absolutely continuous
            solution of maximal support (None if there is none at all)
        floor_ratio: r with measure >= r P0
        ceiling_ratio: s with measure <= s P0
        program: The main program
        outcome: Its outcome
        obstruction_program: Program whose infeasibility proves non-existence
        obstruction: Its outcome, carrying Farkas multipliers
    """
    problem: str
    found: bool
    measure: Optional[Measure]
    tau: Optional[Fraction]
    partial: Optional[Measure]
    floor_ratio: Optional[Fraction]
    ceiling_ratio: Optional[Fraction]
    program: LinearProgram
    outcome: LpOutcome
    obstruction_program: Optional[LinearProgram] = None
    obstruction: Optional[LpOutcome] = None

    @property
    def report_type(self) -> str:
        return "measure"

    def to_dict(self) -> Dict[str, object]:
        def weights(m: Optional[Measure]):
            return None if m is None else {a: str(w) for a, w in zip(m.space.atoms, m.weights)}

        def exact(v: Optional[Fraction]):
            return None if v is None else str(v)

        return {
            "problem": self.problem,
            "found": self.found,
            "measure": weights(self.measure),
            "tau": exact(self.tau),
            "floor_ratio": exact(self.floor_ratio),
            "ceiling_ratio": exact(self.ceiling_ratio),
            "partial": weights(self.partial),
            "certificate": self.outcome.to_dict(),
            "obstruction": None if self.obstruction is None else {
                "rows": [c.name for c in self.obstruction_program.constraints],
                **self.obstruction.to_dict(),
            },
        }

    def to_json(self) -> str:
        """Serialize to JSON string."""
        return json.dumps(self.to_dict(), indent=2)


def _check_cone(space: FiniteProbSpace, cone: ConeSpec) -> None:
    if not space.same_atoms(cone.space):
        raise SpaceMismatchError("Cone and space live on different atoms")


def _check_equivalent(space: FiniteProbSpace, Q: Measure) -> None:
    if not space.same_atoms(Q.space):
        raise SpaceMismatchError("Measure and space live on different atoms")
    if not is_equivalent_to_reference(Q):
        raise PreconditionError("Q must be equivalent to the reference measure")


def _supermartingale_rows(
    builder: LpBuilder, cone: ConeSpec, weights: Sequence[int]
) -> None:
    """E_P(X_j) <= 0 for each generator (= 0 for linear spaces)."""
    relation = Relation.EQ if cone.is_linear else Relation.LE
    for name, generator in zip(cone.names, cone.generators):
        terms = {var: x for var, x in zip(weights, generator.values) if x != 0}
        builder.add_constraint(terms, relation, 0, name=f"supermartingale[{name}]")


def _measure_from(space: FiniteProbSpace, point: Sequence[Fraction], weights: Sequence[int]) -> Measure:
    return Measure(space=space, weights=tuple(point[var] for var in weights))


def single_x_density(
    space: FiniteProbSpace, Q: Measure, X: RandomVariable, k: Fraction
) -> Measure:
    """The measure P = f Q with f = (I{X>=0} + t I{X<0})/(Q(X>=0) + t Q(X<0)).

    With t = k + 1, P lies in the band of Q and satisfies
    E_P(X) (Q(X>=0) + t Q(X<0)) = E_Q(X) - k E_Q(X-), hence E_P(X) <= 0.

    Raises:
        DensityPreconditionError: If E_Q(X) > k E_Q(X-)
        PreconditionError: If Q is not equivalent to P0
    """
    k = Fraction(k)
    if k < 0:
        raise NegativeParameterError(f"k must be nonnegative, got {k}")
    _check_equivalent(space, Q)
    _, negative = value_decomp(X)
    if expectation(Q, X) > k * expectation(Q, negative):
        raise DensityPreconditionError(
            f"E_Q(X) = {expectation(Q, X)} exceeds k E_Q(X-) = {k * expectation(Q, negative)}"
        )
    t = k + 1
    scale = [Fraction(1) if x >= 0 else t for x in X.values]
    denominator = sum((q * s for q, s in zip(Q.weights, scale)), ZERO)
    return Measure(
        space=Q.space,
        weights=tuple(q * s / denominator for q, s in zip(Q.weights, scale)),
    )


def find_esm_in_band(
    space: FiniteProbSpace, cone: ConeSpec, Q: Measure, k: Fraction
) -> MeasureCertificate:
    """A supermartingale measure P with Q/t <= P <= t Q, t = k + 1.

    Raises:
        PreconditionError: If Q is not equivalent to P0
        NegativeParameterError: If k < 0
    """
    _check_cone(space, cone)
    _check_equivalent(space, Q)
    band = BandSpec.from_constant(Q, k)
    builder = LpBuilder(Sense.MAXIMIZE)
    weights = [
        builder.add_variable(f"P[{a}]", lower=band.lower(w), upper=band.upper(w))
        for w, a in enumerate(space.atoms)
    ]
    builder.add_constraint({var: 1 for var in weights}, Relation.EQ, 1, name="mass")
    _supermartingale_rows(builder, cone, weights)
    program = builder.build()
    outcome = solve(program)

    if outcome.is_infeasible:
        logger.info(f"No supermartingale measure in the band t = {band.t}")
        return MeasureCertificate(
            problem="band", found=False, measure=None, tau=None, partial=None,
            floor_ratio=None, ceiling_ratio=None, program=program, outcome=outcome,
            obstruction_program=program, obstruction=outcome,
        )
    r, s = band.reference_ratios()
    logger.info(f"Supermartingale measure found in the band t = {band.t}")
    return MeasureCertificate(
        problem="band", found=True, measure=_measure_from(space, outcome.point, weights),
        tau=None, partial=None, floor_ratio=r, ceiling_ratio=s,
        program=program, outcome=outcome,
    )


def _strict_system(space: FiniteProbSpace, cone: ConeSpec) -> LinearProgram:
    """P >= P0 with the supermartingale rows and no normalization.

    Feasible iff an equivalent supermartingale measure exists (normalize P);
    an infeasible outcome is therefore a Farkas proof of non-existence.
    """
    builder = LpBuilder(Sense.MAXIMIZE)
    weights = [
        builder.add_variable(f"P[{a}]", lower=p0) for a, p0 in zip(space.atoms, space.weights)
    ]
    _supermartingale_rows(builder, cone, weights)
    return builder.build()


def _maximal_support(
    space: FiniteProbSpace, cone: ConeSpec, first: Sequence[Fraction]
) -> Optional[Measure]:
    """Average of solutions that keep enlarging the support.

    The feasible set is convex, so the average is feasible and charges every
    atom some solution charges; the loop stops when no solution can charge
    an atom outside the current support.
    """
    solutions = [list(first)]
    support = {w for w, p in enumerate(first) if p > 0}
    while len(support) < space.size:
        builder = LpBuilder(Sense.MAXIMIZE)
        weights = [builder.add_variable(f"P[{a}]") for a in space.atoms]
        builder.add_constraint({var: 1 for var in weights}, Relation.EQ, 1, name="mass")
        _supermartingale_rows(builder, cone, weights)
        builder.set_objective({weights[w]: 1 for w in range(space.size) if w not in support})
        outcome = solve(builder.build())
        if outcome.value == 0:
            break
        point = [outcome.point[var] for var in weights]
        solutions.append(point)
        support |= {w for w, p in enumerate(point) if p > 0}
    count = len(solutions)
    return Measure(
        space=space,
        weights=tuple(sum((s[w] for s in solutions), ZERO) / count for w in range(space.size)),
    )


def find_esm(space: FiniteProbSpace, cone: ConeSpec) -> MeasureCertificate:
    """An equivalent supermartingale measure, or a proof that none exists.

    Maximizes tau subject to P >= tau P0, sum P = 1 and the supermartingale
    rows. An equivalent measure exists iff the optimal tau is positive. When
    it is 0, the strict system P >= P0 (unnormalized) is solved to obtain
    Farkas multipliers, and an absolutely continuous solution of maximal
    support is returned alongside.
    """
    _check_cone(space, cone)
    builder = LpBuilder(Sense.MAXIMIZE)
    weights = [builder.add_variable(f"P[{a}]") for a in space.atoms]
    tau = builder.add_variable("tau")
    for w, (a, p0) in enumerate(zip(space.atoms, space.weights)):
        builder.add_constraint({weights[w]: 1, tau: -p0}, Relation.GE, 0, name=f"floor[{a}]")
    builder.add_constraint({var: 1 for var in weights}, Relation.EQ, 1, name="mass")
    _supermartingale_rows(builder, cone, weights)
    builder.set_objective({tau: 1})
    program = builder.build()
    outcome = solve(program)

    if outcome.is_optimal and outcome.value > 0:
        measure = _measure_from(space, outcome.point, weights)
        f = density_of(measure, space.reference_measure())
        logger.info(f"Equivalent supermartingale measure found, tau = {outcome.value}")
        return MeasureCertificate(
            problem="esm", found=True, measure=measure, tau=outcome.value, partial=None,
            floor_ratio=min(f.values), ceiling_ratio=max(f.values),
            program=program, outcome=outcome,
        )

    strict = _strict_system(space, cone)
    obstruction = solve(strict)
    partial = None
    if outcome.is_optimal:
        partial = _maximal_support(space, cone, [outcome.point[var] for var in weights])
    logger.info("No equivalent supermartingale measure")
    return MeasureCertificate(
        problem="esm", found=False, measure=None,
        tau=outcome.value if outcome.is_optimal else None, partial=partial,
        floor_ratio=None, ceiling_ratio=None, program=program, outcome=outcome,
        obstruction_program=strict, obstruction=obstruction,
    )


def find_esfa_with_floor(
    space: FiniteProbSpace, cone: ConeSpec, r: Fraction
) -> MeasureCertificate:
    """A supermartingale measure with P >= r P0 (on a finite space, an ESFA is an ESM).

    Raises:
        PreconditionError: If r <= 0
    """
    r = Fraction(r)
    if r <= 0:
        raise PreconditionError(f"r must be positive, got {r}")
    _check_cone(space, cone)
    builder = LpBuilder(Sense.MAXIMIZE)
    weights = [
        builder.add_variable(f"P[{a}]", lower=r * p0) for a, p0 in zip(space.atoms, space.weights)
    ]
    builder.add_constraint({var: 1 for var in weights}, Relation.EQ, 1, name="mass")
    _supermartingale_rows(builder, cone, weights)
    program = builder.build()
    outcome = solve(program)
    if outcome.is_infeasible:
        logger.info(f"No supermartingale measure with floor r = {r}")
        return MeasureCertificate(
            problem="floor", found=False, measure=None, tau=None, partial=None,
            floor_ratio=None, ceiling_ratio=None, program=program, outcome=outcome,
            obstruction_program=program, obstruction=outcome,
        )
    measure = _measure_from(space, outcome.point, weights)
    f = density_of(measure, space.reference_measure())
    return MeasureCertificate(
        problem="floor", found=True, measure=measure, tau=None, partial=None,
        floor_ratio=r, ceiling_ratio=max(f.values), program=program, outcome=outcome,
    )


def _check_at_least_one(Y: RandomVariable) -> None:
    if any(y < 1 for y in Y.values):
        raise DominationError("The rescaling variable must satisfy Y >= 1 on every atom")


def rescale_cone(cone: ConeSpec, Y: RandomVariable) -> ConeSpec:
    """The cone L* = {X/Y : X in L}, of the same kind.

    Raises:
        DominationError: If Y < 1 somewhere
    """
    _check_at_least_one(Y)
    if not cone.space.same_atoms(Y.space):
        raise SpaceMismatchError("Cone and variable live on different atoms")
    return cone.with_generators([g / Y for g in cone.generators])


def deflate_measure(T: Measure, Y: RandomVariable) -> Measure:
    """P(A) = E_T(I_A/Y) / E_T(1/Y).

    Raises:
        DominationError: If Y < 1 somewhere
    """
    _check_at_least_one(Y)
    if not T.space.same_atoms(Y.space):
        raise SpaceMismatchError("Measure and variable live on different atoms")
    return normalized_measure(T.space, [t / y for t, y in zip(T.weights, Y.values)])


def inflate_measure(P: Measure, Y: RandomVariable) -> Measure:
    """T(A) = E_P(I_A Y) / E_P(Y); the inverse of deflate_measure.

    Raises:
        DominationError: If Y < 1 somewhere
    """
    _check_at_least_one(Y)
    if not P.space.same_atoms(Y.space):
        raise SpaceMismatchError("Measure and variable live on different atoms")
    return normalized_measure(P.space, [p * y for p, y in zip(P.weights, Y.values)])


def dominating_variable(
    space: FiniteProbSpace, variables: Sequence[RandomVariable]
) -> Tuple[RandomVariable, List[Fraction]]:
    """Y = 1 + sum_n Y_n/(2^n a_n) dominating each Y_n up to 2^n a_n.

    a_n is the smallest positive candidate among the values of Y_n and 1
    with P0(Y_n > a_n) < 2^-n.

    Raises:
        DominationError: If some Y_n takes a negative value
    """
    reference = space.reference_measure()
    Y = space.constant(1)
    thresholds: List[Fraction] = []
    for n, Yn in enumerate(variables, start=1):
        if not space.same_atoms(Yn.space):
            raise SpaceMismatchError("Variable and space live on different atoms")
        if not Yn.is_nonnegative():
            raise DominationError(f"Y_{n} must be nonnegative")
        bound = Fraction(1, 2 ** n)
        candidates = sorted({v for v in Yn.values if v > 0} | {Fraction(1)})
        a_n = next(
            a for a in candidates
            if expectation(reference, space.random_variable(
                [1 if v > a else 0 for v in Yn.values])) < bound
        )
        thresholds.append(a_n)
        Y = Y + Yn / (2 ** n * a_n)
    return Y, thresholds


def recover_mixture_component(P: Measure, Q: Measure, k: Fraction) -> Measure:
    """P1 = ((1 + k) P - Q)/k, so that P = (Q + k P1)/(1 + k).

    P1 is a measure exactly when P >= Q/(1 + k), which holds for every P in
    the band of (Q, k).

    Raises:
        MixtureRecoveryError: If k <= 0 or the recovered weights are negative
    """
    k = Fraction(k)
    if k <= 0:
        raise MixtureRecoveryError(f"k must be positive, got {k}")
    if not P.space.same_atoms(Q.space):
        raise SpaceMismatchError("Measures live on different atoms")
    weights = [((1 + k) * p - q) / k for p, q in zip(P.weights, Q.weights)]
    negative = [a for a, w in zip(P.space.atoms, weights) if w < 0]
    if negative:
        raise MixtureRecoveryError(f"P is below Q/(1+k) on atoms {negative}")
    return Measure(space=P.space, weights=tuple(weights))


def find_esm_by_rescaling(
    space: FiniteProbSpace, cone: ConeSpec, Y: Optional[RandomVariable] = None
) -> MeasureCertificate:
    """An ESM for L obtained through the rescaled cone L* = {X/Y : X in L}.

    Solves the ESM problem for L* (every member bounded by its generators'
    sup norm), then deflates the solution T to P(A) = E_T(I_A/Y)/E_T(1/Y).
    E_P(X) has the sign of E_T(X/Y), so P is an ESM for L exactly when T is
    one for L*. Y defaults to 1 + sum_j |X_j|.

    Raises:
        DominationError: If Y < 1 somewhere
    """
    _check_cone(space, cone)
    if Y is None:
        Y = space.constant(1)
        for generator in cone.generators:
            Y = Y + abs(generator)
    rescaled = find_esm(space, rescale_cone(cone, Y))
    measure = None if rescaled.measure is None else deflate_measure(rescaled.measure, Y)
    partial = None if rescaled.partial is None else deflate_measure(rescaled.partial, Y)
    floor_ratio = ceiling_ratio = None
    if measure is not None:
        f = density_of(measure, space.reference_measure())
        floor_ratio, ceiling_ratio = min(f.values), max(f.values)
    logger.info(f"Rescaled ESM search: found = {rescaled.found}")
    return MeasureCertificate(
        problem="rescaled", found=rescaled.found, measure=measure, tau=rescaled.tau,
        partial=partial, floor_ratio=floor_ratio, ceiling_ratio=ceiling_ratio,
        program=rescaled.program, outcome=rescaled.outcome,
        obstruction_program=rescaled.obstruction_program, obstruction=rescaled.obstruction,
    )
