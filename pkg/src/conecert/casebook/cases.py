"""Finite reproductions of the classical ESM/ESFA counterexamples.

Each case is a processor: ``validate()`` inspects the input and
``process()`` runs the case, returning a CaseReport whose verified claims
were re-checked through the criteria and construct operations.

Requirements covered:
- Finite-dimensional FTAP: NA <=> ESM, the band-strengthened ESM, and
  invariance of NA under X_j -> X_j/(1 + sum|X_i|)
- Sign sequences: ess sup(X) = sum|b_m| = ess sup(-X), minK_b(P0) <= 1, the
  dominating T = P/r for a random density f, and ESMs restored by an
  independent horizon N through Q = sum_m 2^-m Q_m
- Approximate ESFA: Q_eps with E_Q(X) <= eps ess sup(-X), the truncated
  Poisson ratio, and the absence of an equivalent ESM for the full family
- NFLVR gap: the expectation identity and growth of ess sup with truncation
- Finite-dimensional Rokhlin-Schachermayer question: g = psi/r
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, floor
from typing import Dict, List, Optional, Sequence, Tuple, Type
import logging

import numpy as np

from src.conecert.casebook.report import CaseReport
from src.conecert.construct.construct import find_esfa_with_floor, find_esm, find_esm_in_band
from src.conecert.criteria.criteria import (
    check_condition_a,
    check_condition_d,
    check_na,
    min_k_b,
    min_k_b_star,
)
from src.conecert.space.space import (
    ConeKind,
    ConeSpec,
    FiniteProbSpace,
    Measure,
    RandomVariable,
    combine,
    density_of,
    ess_sup,
    expectation,
    is_equivalent_to_reference,
    normalized_measure,
    probability,
)


# Configure module logger
logger = logging.getLogger(__name__)

MAX_ATOMS = 12
MAX_GENERATORS = 8
MAX_SIGN_LENGTH = 12
MAX_HORIZON = 5
DEFAULT_HORIZON = 3
MAX_DENSITY_SIGNS = 6
MAX_POISSON_TRUNCATION = 12
MAX_GRID_ATOMS = 1024
IDENTITY_TOLERANCE = Fraction(1, 10 ** 9)
LIMIT_TOLERANCE = 1e-3


@dataclass
class ValidationError:
    """A validation error for case input."""
    field: str
    message: str


@dataclass
class ValidationWarning:
    """A validation warning for case input."""
    field: str
    message: str


@dataclass
class ValidationResult:
    """Result of input validation."""
    is_valid: bool
    errors: List[ValidationError] = field(default_factory=list)
    warnings: List[ValidationWarning] = field(default_factory=list)


class InvalidInputError(Exception):
    """Raised when case input validation fails."""
    pass


def _result(errors: List[ValidationError], warnings: List[ValidationWarning]) -> ValidationResult:
    return ValidationResult(is_valid=not errors, errors=errors, warnings=warnings)


def _raise_if_invalid(validation: ValidationResult) -> None:
    if not validation.is_valid:
        error_msgs = "; ".join(f"{e.field}: {e.message}" for e in validation.errors)
        raise InvalidInputError(f"Input validation failed: {error_msgs}")


def _random_weights(rng: np.random.Generator, size: int) -> Tuple[Fraction, ...]:
    raw = [int(v) for v in rng.integers(1, 10, size=size)]
    total = sum(raw)
    return tuple(Fraction(v, total) for v in raw)


def random_instance(
    rng: np.random.Generator,
    atoms: int,
    generators: int,
    kind: ConeKind = ConeKind.LINEAR,
    low: int = -3,
    high: int = 3,
) -> ConeSpec:
    """Random positive rational weights and integer generators in [low, high]."""
    space = FiniteProbSpace(
        atoms=tuple(f"w{i + 1}" for i in range(atoms)),
        weights=_random_weights(rng, atoms),
    )
    values = [
        space.random_variable([int(v) for v in rng.integers(low, high + 1, size=atoms)])
        for _ in range(generators)
    ]
    return ConeSpec(space=space, generators=tuple(values), kind=kind)


# Finite-dimensional FTAP

@dataclass(frozen=True)
class FiniteDimFtapInput:
    """Input for the finite-dimensional FTAP case.

    Attributes:
        seed: Seed of the random instance
        atoms: Number of atoms of the random instance
        generators: Number of generators of the random instance
        instance: A fixed linear space to use instead of a random one
    """
    seed: int = 0
    atoms: int = 4
    generators: int = 2
    instance: Optional[ConeSpec] = None


class FiniteDimFtapCase:
    """NA <=> ESM on a linear space generated by finitely many payoffs."""

    name = "finite-dim-ftap"
    input_type = FiniteDimFtapInput

    def validate(self, input_data: FiniteDimFtapInput) -> ValidationResult:
        errors: List[ValidationError] = []
        warnings: List[ValidationWarning] = []
        if input_data.instance is not None:
            if not input_data.instance.generators:
                warnings.append(ValidationWarning("instance", "Instance has no generators"))
            return _result(errors, warnings)
        if not 1 <= input_data.atoms <= MAX_ATOMS:
            errors.append(ValidationError("atoms", f"Must lie in 1..{MAX_ATOMS}"))
        if not 1 <= input_data.generators <= MAX_GENERATORS:
            errors.append(ValidationError("generators", f"Must lie in 1..{MAX_GENERATORS}"))
        return _result(errors, warnings)

    def process(self, input_data: FiniteDimFtapInput) -> CaseReport:
        """Run the case.

        Raises:
            InvalidInputError: If input validation fails
        """
        _raise_if_invalid(self.validate(input_data))
        cone = input_data.instance
        if cone is None:
            rng = np.random.default_rng(input_data.seed)
            cone = random_instance(rng, input_data.atoms, input_data.generators)
            parameters = {
                "seed": str(input_data.seed),
                "atoms": str(input_data.atoms),
                "generators": str(input_data.generators),
            }
        else:
            parameters = {"instance": "given", "atoms": str(cone.space.size),
                          "generators": str(cone.dimension)}
        space = cone.space
        reference = space.reference_measure()
        report = CaseReport(case=self.name, parameters=parameters)

        na = check_na(space, cone)
        esm = find_esm(space, cone)
        report.check("NA holds", na.holds, na.holds, "check_na")
        report.check("NA verdict agrees with find_esm", na.holds == esm.found, esm.tau, "check_na, find_esm")

        k_star = min_k_b_star(space, cone, reference)
        verdicts = [
            na.holds,
            check_condition_a(space, cone).holds,
            check_condition_d(space, cone).holds,
            k_star.is_finite,
            esm.found,
        ]
        report.check(
            "NA, (a), (d), finite minK(b*) and ESM existence agree",
            len(set(verdicts)) == 1,
            ["holds" if v else "fails" for v in verdicts],
            "check_na, check_condition_a, check_condition_d, min_k_b_star, find_esm",
        )

        if esm.found:
            report.check(
                "E_P(X_j) = 0 for every generator",
                all(expectation(esm.measure, g) == 0 for g in cone.generators),
                esm.tau,
                "find_esm, expectation",
            )
        if esm.found and k_star.is_finite:
            band = find_esm_in_band(space, cone, reference, k_star.value)
            holds = band.found
            ratios = None
            if band.found:
                r, s = band.floor_ratio, band.ceiling_ratio
                f = density_of(band.measure, reference)
                holds = all(r <= v <= s for v in f.values)
                ratios = [str(r), str(s)]
            report.check("ESM with r P0 <= P <= s P0", holds, ratios, "min_k_b_star, find_esm_in_band")

        scale = space.constant(1)
        for generator in cone.generators:
            scale = scale + abs(generator)
        normalized = cone.with_generators([g / scale for g in cone.generators])
        na_normalized = check_na(space, normalized)
        report.check(
            "NA verdict unchanged by X_j -> X_j/(1 + sum|X_i|)",
            na_normalized.holds == na.holds,
            na_normalized.holds,
            "check_na",
        )
        return report


# Sign sequences

def sign_space(n: int, weights: Optional[Sequence[Fraction]] = None) -> ConeSpec:
    """Independent signs X_1..X_n on 2^n atoms, as a linear space.

    Args:
        n: Number of coordinates
        weights: P0(X_m = -1) per coordinate; defaults to (m+1)^-2
    """
    down = (
        tuple(Fraction(w) for w in weights)
        if weights is not None
        else tuple(Fraction(1, (m + 1) ** 2) for m in range(1, n + 1))
    )
    outcomes = list(product((1, -1), repeat=n))
    masses = []
    for signs in outcomes:
        mass = Fraction(1)
        for s, q in zip(signs, down):
            mass *= (1 - q) if s > 0 else q
        masses.append(mass)
    space = FiniteProbSpace(
        atoms=tuple("".join("+" if s > 0 else "-" for s in signs) for signs in outcomes),
        weights=tuple(masses),
    )
    generators = tuple(
        space.random_variable([signs[m] for signs in outcomes]) for m in range(n)
    )
    return ConeSpec(space=space, generators=generators, kind=ConeKind.LINEAR)


def horizon_space(h: int, weights: Optional[Sequence[Fraction]] = None) -> ConeSpec:
    """Signs X_1..X_h with an independent horizon N in {1..h}, as a linear space.

    Atoms are "m|signs". P0(N = m) is proportional to 2^-m, and the payoffs
    are Z_j = X_j I{N >= j}, so every member reads sum_{j <= N} b_j X_j.
    """
    signs = sign_space(h, weights)
    horizon = _horizon_weights(h)
    atoms, masses = [], []
    for m in range(1, h + 1):
        for label, mass in zip(signs.space.atoms, signs.space.weights):
            atoms.append(f"{m}|{label}")
            masses.append(horizon[m - 1] * mass)
    space = FiniteProbSpace(atoms=tuple(atoms), weights=tuple(masses))
    generators = []
    for j, X in enumerate(signs.generators, start=1):
        values = []
        for m in range(1, h + 1):
            values.extend(v if m >= j else 0 for v in X.values)
        generators.append(space.random_variable(values))
    return ConeSpec(
        space=space,
        generators=tuple(generators),
        kind=ConeKind.LINEAR,
        names=tuple(f"X{j}I{{N>={j}}}" for j in range(1, h + 1)),
    )


def _horizon_weights(h: int) -> Tuple[Fraction, ...]:
    masses = [Fraction(1, 2 ** m) for m in range(1, h + 1)]
    total = sum(masses, Fraction(0))
    return tuple(w / total for w in masses)


def horizon_esm(
    h: int, weights: Optional[Sequence[Fraction]] = None
) -> Tuple[Optional[Measure], List[bool]]:
    """Q = sum_m 2^-m Q_m, with Q_m an ESM for X_1..X_m under P0(.|N = m).

    Returns the glued measure on ``horizon_space(h, weights)`` (None if some
    slice has no ESM) and whether each slice was solved.
    """
    signs = sign_space(h, weights)
    slices = [
        find_esm(
            signs.space,
            ConeSpec(space=signs.space, generators=signs.generators[:m], kind=ConeKind.LINEAR),
        )
        for m in range(1, h + 1)
    ]
    solved = [s.found for s in slices]
    if not all(solved):
        return None, solved
    space = horizon_space(h, weights).space
    horizon = _horizon_weights(h)
    glued = [
        horizon[m] * w for m, s in enumerate(slices) for w in s.measure.weights
    ]
    return Measure(space=space, weights=tuple(glued)), solved


@dataclass(frozen=True)
class SignSequencesInput:
    """Input for the sign-sequence case.

    Attributes:
        n: Number of sign coordinates
        weights: P0(X_m = -1) per coordinate; None for (m+1)^-2
        samples: Number of random coefficient vectors
        seed: Seed for the coefficient vectors and the density f
        horizon: Length h of the independent-horizon family; None for min(n, 3)
    """
    n: int = 3
    weights: Optional[Tuple[Fraction, ...]] = None
    samples: int = 100
    seed: int = 0
    horizon: Optional[int] = None


class SignSequencesCase:
    """Condition (b) holds with k = 1 although ESMs need not exist in the limit."""

    name = "sign-sequences"
    input_type = SignSequencesInput

    def validate(self, input_data: SignSequencesInput) -> ValidationResult:
        errors: List[ValidationError] = []
        if not 1 <= input_data.n <= MAX_SIGN_LENGTH:
            errors.append(ValidationError("n", f"Must lie in 1..{MAX_SIGN_LENGTH}"))
        if input_data.weights is not None:
            if len(input_data.weights) != input_data.n:
                errors.append(ValidationError("weights", f"Expected {input_data.n} values"))
            elif any(not 0 < Fraction(w) < 1 for w in input_data.weights):
                errors.append(ValidationError("weights", "Each P0(X_m = -1) must lie in (0, 1)"))
        horizon = input_data.horizon
        if horizon is not None and not 1 <= horizon <= min(input_data.n, MAX_HORIZON):
            errors.append(ValidationError("horizon", f"Must lie in 1..min(n, {MAX_HORIZON})"))
        if input_data.samples < 1:
            errors.append(ValidationError("samples", "Must be positive"))
        return _result(errors, [])

    def process(self, input_data: SignSequencesInput) -> CaseReport:
        """Run the case.

        Raises:
            InvalidInputError: If input validation fails
        """
        _raise_if_invalid(self.validate(input_data))
        n = input_data.n
        cone = sign_space(n, input_data.weights)
        space = cone.space
        reference = space.reference_measure()
        report = CaseReport(
            case=self.name,
            parameters={
                "n": str(n),
                "weights": "default" if input_data.weights is None
                else ",".join(str(Fraction(w)) for w in input_data.weights),
                "samples": str(input_data.samples),
                "seed": str(input_data.seed),
                "horizon": str(self._horizon(input_data)),
            },
        )

        rng = np.random.default_rng(input_data.seed)
        failures = 0
        for _ in range(input_data.samples):
            b = [int(v) for v in rng.integers(-5, 6, size=n)]
            X = combine(cone, b)
            total = sum(abs(v) for v in b)
            if not ess_sup(X) == total == ess_sup(-X):
                failures += 1
        report.check(
            f"ess sup(X) = sum|b_m| = ess sup(-X) on {input_data.samples} random b",
            failures == 0,
            input_data.samples - failures,
            "ess_sup",
        )

        k = min_k_b(space, cone, reference)
        report.check("minK(b) under P0 is at most 1", k.bounded_by(1), k.value, "min_k_b")

        for m, generator in enumerate(cone.generators, start=1):
            mean = expectation(reference, generator)
            if input_data.weights is None:
                report.check(
                    f"E[X{m}] = 1 - 2/({m}+1)^2",
                    mean == 1 - Fraction(2, (m + 1) ** 2),
                    mean,
                    "expectation",
                )
            else:
                report.inform(f"E[X{m}]", mean, "expectation")

        self._density_claims(report, input_data, rng)
        self._horizon_claims(report, input_data, rng)
        return report

    @staticmethod
    def _horizon(input_data: SignSequencesInput) -> int:
        if input_data.horizon is not None:
            return input_data.horizon
        return min(input_data.n, DEFAULT_HORIZON)

    def _density_claims(
        self, report: CaseReport, input_data: SignSequencesInput, rng: np.random.Generator
    ) -> None:
        """For a random strictly positive density f: some ESM P has P >= r P_f.

        Then T = P/r dominates P_f and annihilates L, and g = (dP/dP0)/r is a
        density with g >= f and E_P0(g X) = 0.
        """
        d = min(input_data.n, MAX_DENSITY_SIGNS)
        weights = None if input_data.weights is None else input_data.weights[:d]
        cone = sign_space(d, weights)
        space = cone.space
        reference = space.reference_measure()
        raw = space.random_variable([int(v) for v in rng.integers(1, 10, size=space.size)])
        f = raw / expectation(reference, raw)
        P_f = Measure(space=space, weights=tuple(p * v for p, v in zip(space.weights, f.values)))

        k = min_k_b(space, cone, P_f)
        report.check(
            f"minK(b) under P_f is at most 1 on X1..X{d}", k.bounded_by(1), k.value, "min_k_b"
        )
        if not k.is_finite:
            return
        r = 1 / (1 + k.value)
        floor = find_esfa_with_floor(space.with_reference(P_f), cone, r)
        dominated = annihilated = False
        if floor.found:
            T = [w / r for w in floor.measure.weights]
            dominated = all(t >= q for t, q in zip(T, P_f.weights))
            annihilated = all(
                sum((t * x for t, x in zip(T, X.values)), Fraction(0)) == 0
                for X in cone.generators
            )
        report.check(
            "T = P/r dominates P_f and annihilates L, r = 1/(1 + k)",
            dominated and annihilated,
            r,
            "min_k_b, find_esfa_with_floor",
        )
        density_ok = False
        if floor.found:
            g = density_of(floor.measure, reference) / r
            density_ok = all(gv >= fv for gv, fv in zip(g.values, f.values)) and all(
                expectation(reference, g * X) == 0 for X in cone.generators
            )
        report.check(
            "g = (dP/dP0)/r satisfies g >= f and E_P0(g X) = 0",
            density_ok,
            None if not floor.found else min(density_of(floor.measure, reference).values),
            "density_of, expectation",
        )

    def _horizon_claims(
        self, report: CaseReport, input_data: SignSequencesInput, rng: np.random.Generator
    ) -> None:
        """An independent horizon N restores ESMs: Q = sum_m 2^-m Q_m."""
        h = self._horizon(input_data)
        weights = None if input_data.weights is None else input_data.weights[:h]
        cone = horizon_space(h, weights)
        Q, solved = horizon_esm(h, weights)
        report.check(
            f"each slice N = m admits an ESM for X1..Xm, m <= {h}",
            all(solved),
            sum(solved),
            "find_esm",
        )
        report.check(
            "Q = sum 2^-m Q_m is an equivalent martingale measure for sum_{j<=N} b_j X_j",
            Q is not None
            and is_equivalent_to_reference(Q)
            and all(expectation(Q, Z) == 0 for Z in cone.generators),
            None if Q is None else min(Q.weights),
            "find_esm, expectation",
        )
        failures = 0
        if Q is not None:
            for _ in range(input_data.samples):
                b = [int(v) for v in rng.integers(-5, 6, size=h)]
                for stop in range(1, h + 1):
                    X = combine(cone, [b[j] if j < stop else 0 for j in range(h)])
                    if expectation(Q, X) != 0:
                        failures += 1
        report.check(
            f"E_Q(sum_{{j <= min(N, n)}} b_j X_j) = 0"
            f" on {input_data.samples} random b and every n",
            Q is not None and failures == 0,
            failures,
            "expectation",
        )
        direct = find_esm(cone.space, cone)
        report.check(
            "find_esm finds an ESM for the independent-horizon family",
            direct.found,
            direct.tau,
            "find_esm",
        )


# Approximate ESFA

def truncated_poisson_weights(N: int) -> Tuple[Fraction, ...]:
    """Poisson(1) weights on {0..N}, renormalized; p_j = (1/j!)/sum_{i<=N} 1/i!."""
    masses = [Fraction(1, factorial(j)) for j in range(N + 1)]
    total = sum(masses, Fraction(0))
    return tuple(m / total for m in masses)


def poisson_pair_space(N: int) -> FiniteProbSpace:
    """(Y, Z) i.i.d. truncated Poisson(1); atom "y,z"."""
    p = truncated_poisson_weights(N)
    return FiniteProbSpace(
        atoms=tuple(f"{y},{z}" for y in range(N + 1) for z in range(N + 1)),
        weights=tuple(p[y] * p[z] for y in range(N + 1) for z in range(N + 1)),
    )


def _pair(label: str) -> Tuple[int, int]:
    y, z = label.split(",")
    return int(y), int(z)


def approx_esfa_cone(space: FiniteProbSpace, n: int) -> ConeSpec:
    """Linear space of X_0 = I{Y=0} - I{Z=0} and X_j = I{Y=j} - P0(Y=j) I{Z>0}, j <= n."""
    cells = [_pair(a) for a in space.atoms]
    N = max(y for y, _ in cells)
    p = truncated_poisson_weights(N)
    generators = [
        space.random_variable([(1 if y == 0 else 0) - (1 if z == 0 else 0) for y, z in cells])
    ]
    for j in range(1, n + 1):
        generators.append(
            space.random_variable([(1 if y == j else 0) - (p[j] if z > 0 else 0) for y, z in cells])
        )
    return ConeSpec(
        space=space,
        generators=tuple(generators),
        kind=ConeKind.LINEAR,
        names=tuple(f"X{j}" for j in range(n + 1)),
    )


def approx_esfa_measure(space: FiniteProbSpace, eps: Fraction) -> Measure:
    """Q_eps = (eps P0(.|B) + P0(.|B^c))/(eps + 1) with B = {Y>0} or {Z>0}."""
    eps = Fraction(eps)
    origin = space.index("0,0")
    in_b = 1 - space.weights[origin]
    weights = []
    for w, p0 in enumerate(space.weights):
        mass = Fraction(1) if w == origin else eps * p0 / in_b
        weights.append(mass / (eps + 1))
    return Measure(space=space, weights=tuple(weights))


@dataclass(frozen=True)
class ApproxEsfaInput:
    """Input for the approximate-ESFA case.

    Attributes:
        eps: The constant epsilon > 0
        N: Poisson truncation level
        n: Generators X_0..X_n used for the inequality (n < N)
        samples: Number of random coefficient vectors
        seed: Seed for the coefficient vectors
    """
    eps: Fraction = Fraction(1, 10)
    N: int = 8
    n: int = 4
    samples: int = 200
    seed: int = 0


class ApproxEsfaCase:
    """ESFAs with arbitrarily heavy equivalent part while no ESM exists."""

    name = "approx-esfa"
    input_type = ApproxEsfaInput

    def validate(self, input_data: ApproxEsfaInput) -> ValidationResult:
        errors: List[ValidationError] = []
        if Fraction(input_data.eps) <= 0:
            errors.append(ValidationError("eps", "Must be positive"))
        if not 2 <= input_data.N <= MAX_POISSON_TRUNCATION:
            errors.append(ValidationError("N", f"Must lie in 2..{MAX_POISSON_TRUNCATION}"))
        if not 1 <= input_data.n < input_data.N:
            errors.append(ValidationError("n", "Must satisfy 1 <= n < N"))
        if input_data.samples < 1:
            errors.append(ValidationError("samples", "Must be positive"))
        return _result(errors, [])

    def process(self, input_data: ApproxEsfaInput) -> CaseReport:
        """Run the case.

        Raises:
            InvalidInputError: If input validation fails
        """
        _raise_if_invalid(self.validate(input_data))
        eps = Fraction(input_data.eps)
        N, n = input_data.N, input_data.n
        space = poisson_pair_space(N)
        reference = space.reference_measure()
        p = truncated_poisson_weights(N)
        cone = approx_esfa_cone(space, n)
        Q = approx_esfa_measure(space, eps)
        report = CaseReport(
            case=self.name,
            parameters={
                "eps": str(eps),
                "N": str(N),
                "n": str(n),
                "samples": str(input_data.samples),
                "seed": str(input_data.seed),
            },
        )

        z_zero = [a for a in space.atoms if _pair(a)[1] == 0]
        in_b = [a for a in space.atoms if a != "0,0"]
        ratio = probability(reference, z_zero) / probability(reference, in_b)

        rng = np.random.default_rng(input_data.seed)
        identity_failures = inequality_failures = 0
        for _ in range(input_data.samples):
            b = [int(v) for v in rng.integers(-5, 6, size=n + 1)]
            X = combine(cone, b)
            weighted = sum((b[j] * p[j] for j in range(1, n + 1)), Fraction(0))
            value = expectation(Q, X)
            if value != weighted * eps / (eps + 1) * ratio:
                identity_failures += 1
            if value - eps * ess_sup(-X) > IDENTITY_TOLERANCE:
                inequality_failures += 1
        report.check(
            f"E_Q(X) = (b eps/(eps+1)) P0(Z=0)/P0(B) on {input_data.samples} random b",
            identity_failures == 0,
            input_data.samples - identity_failures,
            "expectation, probability",
        )
        report.check(
            f"E_Q(X) <= eps ess sup(-X) on {input_data.samples} random b",
            inequality_failures == 0,
            input_data.samples - inequality_failures,
            "expectation, ess_sup",
            tolerance=float(IDENTITY_TOLERANCE),
        )
        k = min_k_b(space, cone, Q)
        report.check(
            f"minK(b) under Q_eps is at most eps on span X0..X{n}",
            k.bounded_by(eps),
            k.value,
            "min_k_b",
        )

        limit = float(np.exp(-1.0) / (1.0 - np.exp(-2.0)))
        report.check("P0(Z=0)/P0(B) < 1", ratio < 1, ratio, "probability")
        report.check(
            "truncated ratio matches e^-1/(1-e^-2)",
            abs(float(ratio) - limit) <= LIMIT_TOLERANCE,
            float(ratio),
            "probability, numpy.exp",
            tolerance=LIMIT_TOLERANCE,
        )
        report.inform("e^-1/(1-e^-2)", limit, "numpy.exp")

        full = approx_esfa_cone(space, N)
        esm = find_esm(space, full)
        report.check(
            f"no equivalent ESM for X0..X{N}",
            not esm.found and esm.tau == 0 and esm.obstruction.is_infeasible,
            esm.tau,
            "find_esm",
        )
        support = esm.partial.support() if esm.partial is not None else ()
        report.check(
            "maximal-support solution lives in {Z = 0}",
            bool(support) and all(_pair(a)[1] == 0 for a in support),
            list(support),
            "find_esm",
        )
        return report


# NFLVR gap

def nflvr_grid(M: int, n: int) -> Tuple[Fraction, ...]:
    """Grid points i h in (0, M) with h = 2^-(n+1)."""
    h = Fraction(1, 2 ** (n + 1))
    return tuple(i * h for i in range(1, M * 2 ** (n + 1)))


def nflvr_space(M: int, n: int) -> FiniteProbSpace:
    """Z uniform on the grid; atoms are the grid values."""
    return FiniteProbSpace.uniform([str(z) for z in nflvr_grid(M, n)])


def _alternating(z: Fraction) -> Fraction:
    return z if floor(z) % 2 == 0 else -z


def nflvr_cone(space: FiniteProbSpace, n: int) -> ConeSpec:
    """X_0 = Z sum_k (-1)^k I{k<=Z<k+1} and X_m = I{Z<m} + Z sum_{k>=m} (-1)^k I{k+2^-m<=Z<k+1}."""
    grid = [Fraction(a) for a in space.atoms]
    generators = [space.random_variable([_alternating(z) for z in grid])]
    for m in range(1, n + 1):
        offset = Fraction(1, 2 ** m)
        generators.append(space.random_variable([
            (1 if z < m else 0)
            + (_alternating(z) if floor(z) >= m and z >= floor(z) + offset else 0)
            for z in grid
        ]))
    return ConeSpec(
        space=space,
        generators=tuple(generators),
        kind=ConeKind.LINEAR,
        names=tuple(f"X{m}" for m in range(n + 1)),
    )


@dataclass(frozen=True)
class NflvrGapInput:
    """Input for the NFLVR-gap case.

    Attributes:
        M: Truncation of Z to (0, M)
        n: Generators X_0..X_n
    """
    M: int = 6
    n: int = 2


class NflvrGapCase:
    """Unbounded payoffs: NFLVR holds in the limit while no ESM exists."""

    name = "nflvr-gap"
    input_type = NflvrGapInput

    def validate(self, input_data: NflvrGapInput) -> ValidationResult:
        errors: List[ValidationError] = []
        if input_data.M < 2:
            errors.append(ValidationError("M", "Must be at least 2"))
        if input_data.n < 1:
            errors.append(ValidationError("n", "Must be at least 1"))
        if not errors and 2 * input_data.M * 2 ** (input_data.n + 1) > MAX_GRID_ATOMS:
            errors.append(ValidationError("M", f"Doubled grid exceeds {MAX_GRID_ATOMS} atoms"))
        return _result(errors, [])

    def process(self, input_data: NflvrGapInput) -> CaseReport:
        """Run the case.

        Raises:
            InvalidInputError: If input validation fails
        """
        _raise_if_invalid(self.validate(input_data))
        M, n = input_data.M, input_data.n
        space = nflvr_space(M, n)
        cone = nflvr_cone(space, n)
        Z = space.random_variable([Fraction(a) for a in space.atoms])
        report = CaseReport(case=self.name, parameters={"M": str(M), "n": str(n)})

        candidates = [
            space.reference_measure(),
            normalized_measure(space, range(1, space.size + 1)),
        ]
        mismatches = 0
        for P in candidates:
            for m in range(1, n + 1):
                offset = Fraction(1, 2 ** m)
                below = [a for a, z in zip(space.atoms, Z.values) if z < m]
                rhs = probability(P, below)
                for k in range(m, M):
                    band = [a for a, z in zip(space.atoms, Z.values) if k + offset <= z < k + 1]
                    rhs += (-1) ** k * expectation(P, Z * space.indicator(band))
                if expectation(P, cone.generators[m]) != rhs:
                    mismatches += 1
        report.check(
            f"E_P(X_m) = P(Z<m) + sum_k (-1)^k E_P(Z I{{k+2^-m<=Z<k+1}}) for m <= {n}",
            mismatches == 0,
            len(candidates) * n - mismatches,
            "expectation, probability",
        )

        top = ess_sup(cone.generators[0])
        expected = max(z for z in nflvr_grid(M, n) if floor(z) % 2 == 0)
        report.check("ess sup(X0) is the largest grid value in an even band", top == expected, top, "ess_sup")
        doubled = nflvr_cone(nflvr_space(2 * M, n), n)
        top_doubled = ess_sup(doubled.generators[0])
        report.check(
            "ess sup(X0) grows when M doubles", top_doubled > top, [str(top), str(top_doubled)], "ess_sup"
        )

        reference = space.reference_measure()
        for m in range(1, n + 1):
            report.inform(f"E_P0(X{m})", expectation(reference, cone.generators[m]), "expectation")
            report.inform(f"P0(Z<{m})", probability(reference, [a for a, z in zip(space.atoms, Z.values) if z < m]), "probability")
        esm = find_esm(space, cone)
        report.inform("truncated family admits an equivalent ESM", esm.found, "find_esm")
        report.inform("optimal floor ratio tau", esm.tau, "find_esm")
        return report


# Finite-dimensional Rokhlin-Schachermayer question

@dataclass(frozen=True)
class DensityInstance:
    """Generators with E_P0(X_j) = 0 and a density f > 0 with E_P0(f) = 1."""
    cone: ConeSpec
    density: RandomVariable


def random_density_instance(
    rng: np.random.Generator, atoms: int, d: int, concentrate: bool = False
) -> DensityInstance:
    space = FiniteProbSpace(
        atoms=tuple(f"w{i + 1}" for i in range(atoms)),
        weights=_random_weights(rng, atoms),
    )
    reference = space.reference_measure()
    generators = []
    for _ in range(d):
        raw = space.random_variable([int(v) for v in rng.integers(-3, 4, size=atoms)])
        generators.append(raw - expectation(reference, raw))
    heights = [int(v) for v in rng.integers(1, 6, size=atoms)]
    if concentrate:
        heights[int(rng.integers(0, atoms))] *= 50
    raw_density = space.random_variable(heights)
    return DensityInstance(
        cone=ConeSpec(space=space, generators=tuple(generators), kind=ConeKind.LINEAR),
        density=raw_density / expectation(reference, raw_density),
    )


@dataclass(frozen=True)
class RokhlinSchachermayerInput:
    """Input for the finite-dimensional Rokhlin-Schachermayer case.

    Attributes:
        seed: Seed of the random instance
        d: Number of generators
        atoms: Number of atoms
        concentrate: Put most of the density's mass on one atom
        instance: A fixed instance to use instead of a random one
    """
    seed: int = 0
    d: int = 3
    atoms: int = 6
    concentrate: bool = False
    instance: Optional[DensityInstance] = None


class RokhlinSchachermayerCase:
    """With finitely many bounded payoffs, g = psi/r satisfies g >= f and E_P0(g X_j) = 0."""

    name = "rokhlin-schachermayer"
    input_type = RokhlinSchachermayerInput

    def validate(self, input_data: RokhlinSchachermayerInput) -> ValidationResult:
        errors: List[ValidationError] = []
        instance = input_data.instance
        if instance is None:
            if not 2 <= input_data.atoms <= MAX_ATOMS:
                errors.append(ValidationError("atoms", f"Must lie in 2..{MAX_ATOMS}"))
            if not 1 <= input_data.d <= MAX_GENERATORS:
                errors.append(ValidationError("d", f"Must lie in 1..{MAX_GENERATORS}"))
            return _result(errors, [])
        reference = instance.cone.space.reference_measure()
        if not instance.cone.is_linear:
            errors.append(ValidationError("instance.cone", "Must be a linear space"))
        if any(expectation(reference, g) != 0 for g in instance.cone.generators):
            errors.append(ValidationError("instance.cone", "Generators must have E_P0(X_j) = 0"))
        if any(v <= 0 for v in instance.density.values):
            errors.append(ValidationError("instance.density", "Must be strictly positive"))
        elif expectation(reference, instance.density) != 1:
            errors.append(ValidationError("instance.density", "Must satisfy E_P0(f) = 1"))
        return _result(errors, [])

    def process(self, input_data: RokhlinSchachermayerInput) -> CaseReport:
        """Run the case.

        Raises:
            InvalidInputError: If input validation fails
        """
        _raise_if_invalid(self.validate(input_data))
        instance = input_data.instance
        if instance is None:
            rng = np.random.default_rng(input_data.seed)
            instance = random_density_instance(
                rng, input_data.atoms, input_data.d, input_data.concentrate
            )
            parameters = {
                "seed": str(input_data.seed),
                "d": str(input_data.d),
                "atoms": str(input_data.atoms),
                "concentrate": str(input_data.concentrate).lower(),
            }
        else:
            parameters = {"instance": "given", "d": str(instance.cone.dimension),
                          "atoms": str(instance.cone.space.size)}
        report = CaseReport(case=self.name, parameters=parameters)

        space, f = instance.cone.space, instance.density
        reference = space.reference_measure()
        P_f = Measure(space=space, weights=tuple(p * v for p, v in zip(space.weights, f.values)))
        space_f = space.with_reference(P_f)
        cone_f = ConeSpec(
            space=space_f,
            generators=tuple(space_f.random_variable(g.values) for g in instance.cone.generators),
            kind=instance.cone.kind,
            names=instance.cone.names,
        )
        center = space_f.reference_measure()

        k = min_k_b_star(space_f, cone_f, center)
        report.check("minK(b*) under P_f is finite", k.is_finite, k.value, "min_k_b_star")
        if not k.is_finite:
            return report
        band = find_esm_in_band(space_f, cone_f, center, k.value)
        ratios = [str(band.floor_ratio), str(band.ceiling_ratio)] if band.found else None
        report.check(
            "Q with r P_f <= Q <= s P_f and E_Q(X_j) = 0", band.found, ratios, "find_esm_in_band"
        )
        if not band.found:
            return report

        r = band.floor_ratio
        psi = density_of(band.measure, reference)
        g = psi / r
        report.inform("r", r, "find_esm_in_band")
        report.check(
            "g = psi/r dominates f on every atom",
            all(gv >= fv for gv, fv in zip(g.values, f.values)),
            [str(v) for v in g.values],
            "density_of",
        )
        mean = expectation(reference, g)
        report.check("E_P0(g) = 1/r is finite", mean == 1 / r, mean, "expectation")
        report.check(
            "E_P0(g X_j) = 0 for every generator",
            all(expectation(reference, g * X) == 0 for X in instance.cone.generators),
            instance.cone.dimension,
            "expectation",
        )
        return report


CASE_REGISTRY: Dict[str, Type] = {
    FiniteDimFtapCase.name: FiniteDimFtapCase,
    SignSequencesCase.name: SignSequencesCase,
    ApproxEsfaCase.name: ApproxEsfaCase,
    NflvrGapCase.name: NflvrGapCase,
    RokhlinSchachermayerCase.name: RokhlinSchachermayerCase,
}


def run_case(name: str, **parameters) -> CaseReport:
    """Build the named case's input from keyword parameters and run it.

    Raises:
        KeyError: If no case is registered under ``name``
        InvalidInputError: If input validation fails
    """
    try:
        processor = CASE_REGISTRY[name]()
    except KeyError:
        raise KeyError(f"Unknown case: {name}; known cases: {sorted(CASE_REGISTRY)}") from None
    return processor.process(processor.input_type(**parameters))


def case_finite_dim_ftap(
    seed: int = 0, atoms: int = 4, generators: int = 2, instance: Optional[ConeSpec] = None
) -> CaseReport:
    return FiniteDimFtapCase().process(FiniteDimFtapInput(seed, atoms, generators, instance))


def case_sign_sequences(
    n: int,
    weights: Optional[Sequence[Fraction]] = None,
    samples: int = 100,
    seed: int = 0,
    horizon: Optional[int] = None,
) -> CaseReport:
    return SignSequencesCase().process(
        SignSequencesInput(n, None if weights is None else tuple(weights), samples, seed, horizon)
    )


def case_approx_esfa(
    eps: Fraction, N: int, n: int, samples: int = 200, seed: int = 0
) -> CaseReport:
    return ApproxEsfaCase().process(ApproxEsfaInput(Fraction(eps), N, n, samples, seed))


def case_nflvr_gap(M: int, n: int) -> CaseReport:
    return NflvrGapCase().process(NflvrGapInput(M, n))


def case_rokhlin_schachermayer(
    seed: int = 0,
    d: int = 3,
    atoms: int = 6,
    concentrate: bool = False,
    instance: Optional[DensityInstance] = None,
) -> CaseReport:
    return RokhlinSchachermayerCase().process(
        RokhlinSchachermayerInput(seed, d, atoms, concentrate, instance)
    )
