"""Finite probability spaces for conecert.

This module houses the sample space, the reference probability, random
variables, cones of payoffs and probability measures, together with the
elementary functionals every decision procedure is written in terms of.

Requirements covered:
- Exact rational arithmetic throughout (fractions.Fraction, canonical form)
- Reference weights strictly positive and summing to exactly 1
- Expectation, essential supremum, positive/negative parts
- Mixtures, densities and the equivalence relation between measures
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union
import re


Rational = Fraction
Scalar = Union[int, Fraction]


class InvalidSpaceError(ValueError):
    """Raised when atoms or reference weights are not a valid finite space."""
    pass


class InvalidMeasureError(ValueError):
    """Raised when weights do not form a probability measure."""
    pass


class SpaceMismatchError(ValueError):
    """Raised when two objects do not live on the same atoms."""
    pass


class NegativeParameterError(ValueError):
    """Raised when a parameter that must be nonnegative is negative."""
    pass


class RationalParseError(ValueError):
    """Raised when text cannot be read as an exact rational."""
    pass


class AbsoluteContinuityError(ValueError):
    """Raised when a measure charges atoms the reference measure does not.

    Attributes:
        witness: Labels of atoms where the reference vanishes and the measure does not
    """

    def __init__(self, message: str, witness: Tuple[str, ...]):
        super().__init__(message)
        self.witness = witness


_RATIONAL_PATTERN = re.compile(r"^\s*[+-]?(\d+(\.\d+)?|\.\d+)(\s*/\s*\d+)?\s*$")


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Read an exact rational from "p/q", an integer or a terminating decimal.

    Args:
        text: The value to read. Python floats are refused.

    Returns:
        The exact rational value

    Raises:
        RationalParseError: If the value is not an exact rational literal
    """
    if isinstance(text, bool):
        raise RationalParseError(f"Not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_PATTERN.match(text):
        raise RationalParseError(f"Not an exact rational literal: {text!r}")
    try:
        return Fraction(text.replace(" ", ""))
    except (ValueError, ZeroDivisionError) as e:
        raise RationalParseError(f"Not an exact rational literal: {text!r}") from e


def _as_fractions(values: Iterable[Scalar]) -> Tuple[Fraction, ...]:
    result = []
    for value in values:
        if isinstance(value, float):
            raise TypeError("Floating-point values are not accepted; use Fraction")
        result.append(Fraction(value))
    return tuple(result)


@dataclass(frozen=True)
class FiniteProbSpace:
    """A finite sample space with its reference probability P0.

    Every subset of the atoms is an event. Null atoms are refused, so the
    support of P0 is the whole space and "almost surely" means "everywhere".

    Attributes:
        atoms: Ordered, distinct atom labels
        weights: Reference probability of each atom (strictly positive, sum 1)
    """
    atoms: Tuple[str, ...]
    weights: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        atoms = tuple(str(a) for a in self.atoms)
        weights = _as_fractions(self.weights)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        if not atoms:
            raise InvalidSpaceError("A space needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise InvalidSpaceError("Atom labels must be distinct")
        if len(weights) != len(atoms):
            raise InvalidSpaceError(
                f"Expected {len(atoms)} weights, got {len(weights)}"
            )
        null_atoms = [a for a, w in zip(atoms, weights) if w <= 0]
        if null_atoms:
            raise InvalidSpaceError(
                f"Reference weights must be strictly positive; offending atoms: {null_atoms}"
            )
        total = sum(weights, Fraction(0))
        if total != 1:
            raise InvalidSpaceError(f"Reference weights sum to {total}, not 1")

    @classmethod
    def uniform(cls, labels: Sequence[str]) -> "FiniteProbSpace":
        """Create a space with equal reference weight on every atom."""
        n = len(labels)
        return cls(atoms=tuple(labels), weights=tuple(Fraction(1, n) for _ in labels))

    @property
    def size(self) -> int:
        """Number of atoms."""
        return len(self.atoms)

    def index(self, label: str) -> int:
        """Position of an atom label."""
        try:
            return self.atoms.index(label)
        except ValueError:
            raise KeyError(f"Unknown atom: {label}") from None

    def reference_measure(self) -> "Measure":
        """P0 as a Measure."""
        return Measure(space=self, weights=self.weights)

    def random_variable(self, values: Sequence[Scalar]) -> "RandomVariable":
        """Build a random variable from one value per atom."""
        return RandomVariable(space=self, values=tuple(values))

    def constant(self, value: Scalar) -> "RandomVariable":
        """The constant random variable."""
        return RandomVariable(space=self, values=tuple(Fraction(value) for _ in self.atoms))

    def indicator(self, atoms: Iterable[str]) -> "RandomVariable":
        """Indicator of a set of atom labels."""
        chosen = set(atoms)
        unknown = chosen - set(self.atoms)
        if unknown:
            raise KeyError(f"Unknown atoms: {sorted(unknown)}")
        return RandomVariable(
            space=self,
            values=tuple(Fraction(1) if a in chosen else Fraction(0) for a in self.atoms),
        )

    def with_reference(self, measure: "Measure") -> "FiniteProbSpace":
        """Same atoms, with ``measure`` as the new reference probability.

        Raises:
            InvalidSpaceError: If the measure has null atoms
        """
        _check_same_atoms(self, measure.space)
        return FiniteProbSpace(atoms=self.atoms, weights=measure.weights)

    def same_atoms(self, other: "FiniteProbSpace") -> bool:
        """True if both spaces carry the same ordered atom list."""
        return self.atoms == other.atoms


def _check_same_atoms(first: FiniteProbSpace, second: FiniteProbSpace) -> None:
    if not first.same_atoms(second):
        raise SpaceMismatchError(
            f"Objects live on different atoms: {first.atoms} vs {second.atoms}"
        )


@dataclass(frozen=True)
class RandomVariable:
    """A real random variable on a finite space, one exact value per atom.

    Attributes:
        space: The space the variable is defined on
        values: Value of the variable at each atom
    """
    space: FiniteProbSpace
    values: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        values = _as_fractions(self.values)
        object.__setattr__(self, "values", values)
        if len(values) != self.space.size:
            raise SpaceMismatchError(
                f"Expected {self.space.size} values, got {len(values)}"
            )

    def __getitem__(self, label: str) -> Fraction:
        return self.values[self.space.index(label)]

    def _combine(self, other, op) -> "RandomVariable":
        if isinstance(other, RandomVariable):
            _check_same_atoms(self.space, other.space)
            return RandomVariable(
                space=self.space,
                values=tuple(op(a, b) for a, b in zip(self.values, other.values)),
            )
        if isinstance(other, float):
            raise TypeError("Floating-point values are not accepted; use Fraction")
        scalar = Fraction(other)
        return RandomVariable(space=self.space, values=tuple(op(a, scalar) for a in self.values))

    def __add__(self, other) -> "RandomVariable":
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "RandomVariable":
        return self._combine(other, lambda a, b: a - b)

    def __rsub__(self, other) -> "RandomVariable":
        return self._combine(other, lambda a, b: b - a)

    def __mul__(self, other) -> "RandomVariable":
        return self._combine(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RandomVariable":
        if isinstance(other, RandomVariable):
            if any(v == 0 for v in other.values):
                raise ZeroDivisionError("Atomwise division by a variable with a zero value")
        elif Fraction(other) == 0:
            raise ZeroDivisionError("Division of a random variable by zero")
        return self._combine(other, lambda a, b: a / b)

    def __neg__(self) -> "RandomVariable":
        return RandomVariable(space=self.space, values=tuple(-a for a in self.values))

    def __abs__(self) -> "RandomVariable":
        return RandomVariable(space=self.space, values=tuple(abs(a) for a in self.values))

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)


class ConeKind(Enum):
    """Membership semantics of a generated family of payoffs."""
    CONE = "cone"
    LINEAR = "linear"


@dataclass(frozen=True)
class ConeSpec:
    """A finitely generated convex cone or linear space of payoffs.

    Members are sum_j lambda_j X_j with lambda_j >= 0 (cone kind) or with
    arbitrary real lambda_j (linear kind). An empty generator list is the
    trivial cone {0}.

    Attributes:
        space: The space the payoffs live on
        generators: The generating payoffs
        kind: Convex cone or linear space
        names: Optional display name per generator
    """
    space: FiniteProbSpace
    generators: Tuple[RandomVariable, ...] = ()
    kind: ConeKind = ConeKind.CONE
    names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        generators = tuple(self.generators)
        object.__setattr__(self, "generators", generators)
        for generator in generators:
            _check_same_atoms(self.space, generator.space)
        names = tuple(self.names) or tuple(f"X{j + 1}" for j in range(len(generators)))
        if len(names) != len(generators):
            raise ValueError(f"Expected {len(generators)} generator names, got {len(names)}")
        object.__setattr__(self, "names", names)

    @property
    def is_linear(self) -> bool:
        return self.kind is ConeKind.LINEAR

    @property
    def dimension(self) -> int:
        """Number of generators (not the rank of their span)."""
        return len(self.generators)

    def with_generators(self, generators: Sequence[RandomVariable]) -> "ConeSpec":
        """A cone of the same kind and names over new generators."""
        return ConeSpec(
            space=self.space, generators=tuple(generators), kind=self.kind, names=self.names
        )


@dataclass(frozen=True)
class Measure:
    """A probability measure on a finite space.

    On a finite algebra finite additivity and countable additivity coincide,
    so this type stands for both.

    Attributes:
        space: The space the measure lives on
        weights: Mass of each atom (nonnegative, sum 1)
    """
    space: FiniteProbSpace
    weights: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        weights = _as_fractions(self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != self.space.size:
            raise InvalidMeasureError(
                f"Expected {self.space.size} weights, got {len(weights)}"
            )
        negative = [a for a, w in zip(self.space.atoms, weights) if w < 0]
        if negative:
            raise InvalidMeasureError(f"Negative mass on atoms {negative}")
        total = sum(weights, Fraction(0))
        if total != 1:
            raise InvalidMeasureError(f"Weights sum to {total}, not 1")

    def __getitem__(self, label: str) -> Fraction:
        return self.weights[self.space.index(label)]

    def support(self) -> Tuple[str, ...]:
        """Labels of atoms with positive mass."""
        return tuple(a for a, w in zip(self.space.atoms, self.weights) if w > 0)


def measure_from_weights(space: FiniteProbSpace, weights: Sequence[Scalar]) -> Measure:
    """Build a measure on ``space``; raises InvalidMeasureError when invalid."""
    return Measure(space=space, weights=tuple(weights))


def normalized_measure(space: FiniteProbSpace, masses: Sequence[Scalar]) -> Measure:
    """Normalize nonnegative masses with positive total into a measure."""
    masses = _as_fractions(masses)
    total = sum(masses, Fraction(0))
    if total <= 0:
        raise InvalidMeasureError("Masses must have a positive total")
    return Measure(space=space, weights=tuple(m / total for m in masses))


class RelationKind(Enum):
    """How one measure relates to another through their null sets."""
    EQUIVALENT = "equivalent"
    ABSOLUTELY_CONTINUOUS = "absolutely-continuous"
    SINGULAR_PART_PRESENT = "singular-part-present"


@dataclass(frozen=True)
class MeasureRelation:
    """Outcome of comparing the null sets of P and T.

    Attributes:
        kind: The relation found
        witness: Atoms where exactly one of the two measures vanishes; for
            ABSOLUTELY_CONTINUOUS these are atoms charged by T only, for
            SINGULAR_PART_PRESENT atoms charged by P only
    """
    kind: RelationKind
    witness: Tuple[str, ...] = ()

    @property
    def is_equivalent(self) -> bool:
        return self.kind is RelationKind.EQUIVALENT


def expectation(P: Measure, X: RandomVariable) -> Fraction:
    """E_P(X) = sum over atoms of P(w) X(w), exact.

    Raises:
        SpaceMismatchError: If P and X live on different atoms
    """
    _check_same_atoms(P.space, X.space)
    return sum((p * x for p, x in zip(P.weights, X.values)), Fraction(0))


def ess_sup(X: RandomVariable) -> Fraction:
    """Essential supremum under P0; on a full-support finite space, the maximum."""
    return max(X.values)


def value_decomp(X: RandomVariable) -> Tuple[RandomVariable, RandomVariable]:
    """Split X into (X+, X-) with X = X+ - X- atomwise."""
    positive = tuple(max(v, Fraction(0)) for v in X.values)
    negative = tuple(max(-v, Fraction(0)) for v in X.values)
    return (
        RandomVariable(space=X.space, values=positive),
        RandomVariable(space=X.space, values=negative),
    )


def probability(P: Measure, atoms: Iterable[str]) -> Fraction:
    """P(A) for a set of atom labels."""
    return expectation(P, P.space.indicator(atoms))


def relate(P: Measure, T: Measure) -> MeasureRelation:
    """Compare supports of P and T.

    Returns:
        EQUIVALENT when supports coincide, ABSOLUTELY_CONTINUOUS when
        support(P) is strictly inside support(T), SINGULAR_PART_PRESENT
        otherwise. The witness lists the atoms responsible.
    """
    _check_same_atoms(P.space, T.space)
    p_only = tuple(
        a for a, p, t in zip(P.space.atoms, P.weights, T.weights) if p > 0 and t == 0
    )
    if p_only:
        return MeasureRelation(kind=RelationKind.SINGULAR_PART_PRESENT, witness=p_only)
    t_only = tuple(
        a for a, p, t in zip(P.space.atoms, P.weights, T.weights) if t > 0 and p == 0
    )
    if t_only:
        return MeasureRelation(kind=RelationKind.ABSOLUTELY_CONTINUOUS, witness=t_only)
    return MeasureRelation(kind=RelationKind.EQUIVALENT)


def is_equivalent_to_reference(P: Measure) -> bool:
    """True if P charges every atom (P ~ P0 on a full-support space)."""
    return all(w > 0 for w in P.weights)


def mixture(Q: Measure, P1: Measure, k: Scalar) -> Measure:
    """The measure (Q + k P1)/(1 + k).

    Raises:
        NegativeParameterError: If k < 0
    """
    k = Fraction(k)
    if k < 0:
        raise NegativeParameterError(f"Mixture weight k must be nonnegative, got {k}")
    _check_same_atoms(Q.space, P1.space)
    return Measure(
        space=Q.space,
        weights=tuple((q + k * p) / (1 + k) for q, p in zip(Q.weights, P1.weights)),
    )


def density_of(P: Measure, wrt: Measure) -> RandomVariable:
    """Density f = dP/d(wrt), set to 0 off the support of ``wrt``.

    Raises:
        AbsoluteContinuityError: If P charges an atom where ``wrt`` vanishes
    """
    _check_same_atoms(P.space, wrt.space)
    witness = tuple(
        a for a, p, w in zip(P.space.atoms, P.weights, wrt.weights) if p > 0 and w == 0
    )
    if witness:
        raise AbsoluteContinuityError(
            f"Measure is not absolutely continuous; charged null atoms: {list(witness)}",
            witness=witness,
        )
    return RandomVariable(
        space=wrt.space,
        values=tuple(p / w if w > 0 else Fraction(0) for p, w in zip(P.weights, wrt.weights)),
    )


def combine(cone: ConeSpec, coefficients: Sequence[Scalar]) -> RandomVariable:
    """The cone member sum_j coefficients[j] * X_j.

    Raises:
        ValueError: On a length mismatch, or negative coefficients for a cone
    """
    coefficients = _as_fractions(coefficients)
    if len(coefficients) != cone.dimension:
        raise ValueError(
            f"Expected {cone.dimension} coefficients, got {len(coefficients)}"
        )
    if not cone.is_linear and any(c < 0 for c in coefficients):
        raise ValueError("Cone members need nonnegative coefficients")
    values = [Fraction(0)] * cone.space.size
    for c, generator in zip(coefficients, cone.generators):
        if c == 0:
            continue
        for i, v in enumerate(generator.values):
            values[i] += c * v
    return RandomVariable(space=cone.space, values=tuple(values))


def span_rank(cone: ConeSpec) -> int:
    """Rank of the generator family, by exact Gaussian elimination."""
    rows: List[List[Fraction]] = [list(g.values) for g in cone.generators]
    rank = 0
    columns = cone.space.size
    for col in range(columns):
        pivot: Optional[int] = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        lead = rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col] / lead
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank
