"""Tests for the space module.

Tests cover:
- Exact rational parsing
- Space, measure and random variable validation
- Expectations, essential suprema and decompositions
- Null-set relations, densities and mixtures
- Randomized linearity, decomposition and density identities
"""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from src.conecert.space import (
    AbsoluteContinuityError,
    ConeKind,
    ConeSpec,
    FiniteProbSpace,
    InvalidMeasureError,
    InvalidSpaceError,
    Measure,
    NegativeParameterError,
    RationalParseError,
    RelationKind,
    SpaceMismatchError,
    combine,
    density_of,
    ess_sup,
    expectation,
    is_equivalent_to_reference,
    mixture,
    normalized_measure,
    parse_rational,
    probability,
    relate,
    span_rank,
    value_decomp,
)

from tests.strategies import equivalent_measures, spaces


class TestParseRational:
    """Tests for parse_rational."""

    def test_fraction_text(self):
        """Test "p/q" literals."""
        assert parse_rational("3/7") == Fraction(3, 7)
        assert parse_rational("-2/4") == Fraction(-1, 2)
        assert parse_rational(" 3 / 7 ") == Fraction(3, 7)

    def test_decimal_and_integer(self):
        """Test terminating decimals and integers."""
        assert parse_rational("0.25") == Fraction(1, 4)
        assert parse_rational(5) == Fraction(5)
        assert parse_rational("12") == Fraction(12)

    @pytest.mark.parametrize("bad", [0.5, True, "abc", "1/0", "", "1e3"])
    def test_rejects_inexact(self, bad):
        """Test floats, booleans and junk are refused."""
        with pytest.raises(RationalParseError):
            parse_rational(bad)


class TestFiniteProbSpace:
    """Tests for FiniteProbSpace."""

    def test_create_space(self, two_atom_space):
        """Test atoms, size and index."""
        assert two_atom_space.size == 2
        assert two_atom_space.index("w2") == 1
        assert two_atom_space.reference_measure().weights == (Fraction(3, 5), Fraction(2, 5))

    def test_uniform(self):
        """Test the uniform constructor."""
        space = FiniteProbSpace.uniform(["a", "b", "c", "d"])
        assert space.weights == (Fraction(1, 4),) * 4

    def test_rejects_null_atom(self):
        """Test zero reference weight is refused."""
        with pytest.raises(InvalidSpaceError):
            FiniteProbSpace(atoms=("a", "b"), weights=(Fraction(1), Fraction(0)))

    def test_rejects_bad_total(self):
        """Test weights must sum to one."""
        with pytest.raises(InvalidSpaceError):
            FiniteProbSpace(atoms=("a", "b"), weights=(Fraction(1, 2), Fraction(1, 3)))

    def test_rejects_duplicate_labels(self):
        """Test labels must be distinct."""
        with pytest.raises(InvalidSpaceError):
            FiniteProbSpace(atoms=("a", "a"), weights=(Fraction(1, 2), Fraction(1, 2)))

    def test_rejects_empty(self):
        """Test a space needs an atom."""
        with pytest.raises(InvalidSpaceError):
            FiniteProbSpace(atoms=(), weights=())

    def test_rejects_float_weights(self):
        """Test floats never enter the exact core."""
        with pytest.raises(TypeError):
            FiniteProbSpace(atoms=("a", "b"), weights=(0.5, 0.5))

    def test_indicator(self, two_atom_space):
        """Test indicator values."""
        assert two_atom_space.indicator(["w2"]).values == (0, 1)


class TestRandomVariable:
    """Tests for RandomVariable arithmetic."""

    def test_arithmetic(self, two_atom_space):
        """Test atomwise operations."""
        X = two_atom_space.random_variable([1, -1])
        Y = two_atom_space.random_variable([2, 3])
        assert (X + Y).values == (3, 2)
        assert (X * Y).values == (2, -3)
        assert (1 - X).values == (0, 2)
        assert abs(X).values == (1, 1)
        assert (X / Y).values == (Fraction(1, 2), Fraction(-1, 3))
        assert X["w2"] == -1

    def test_division_by_zero_value(self, two_atom_space):
        """Test division by a variable with a zero value."""
        X = two_atom_space.random_variable([1, -1])
        with pytest.raises(ZeroDivisionError):
            X / two_atom_space.random_variable([1, 0])

    def test_length_mismatch(self, two_atom_space):
        """Test values must match the atoms."""
        with pytest.raises(SpaceMismatchError):
            two_atom_space.random_variable([1, 2, 3])

    def test_value_decomp(self, two_atom_space):
        """Test X = X+ - X-."""
        positive, negative = value_decomp(two_atom_space.random_variable([1, -1]))
        assert positive.values == (1, 0)
        assert negative.values == (0, 1)


class TestMeasure:
    """Tests for Measure and expectations."""

    def test_expectation_under_reference(self, two_atom_space):
        """Test E_P0(X) = 1/5 for X = (1, -1)."""
        X = two_atom_space.random_variable([1, -1])
        assert expectation(two_atom_space.reference_measure(), X) == Fraction(1, 5)
        assert ess_sup(X) == 1
        assert ess_sup(-X) == 1

    def test_probability(self, two_atom_space):
        """Test probability of an event."""
        assert probability(two_atom_space.reference_measure(), ["w1"]) == Fraction(3, 5)

    def test_rejects_negative_mass(self, two_atom_space):
        """Test negative mass is refused."""
        with pytest.raises(InvalidMeasureError):
            Measure(space=two_atom_space, weights=(Fraction(3, 2), Fraction(-1, 2)))

    def test_rejects_bad_total(self, two_atom_space):
        """Test mass must sum to one."""
        with pytest.raises(InvalidMeasureError):
            Measure(space=two_atom_space, weights=(Fraction(1, 2), Fraction(1, 3)))

    def test_normalized_measure(self, two_atom_space):
        """Test normalization of masses."""
        P = normalized_measure(two_atom_space, [1, 3])
        assert P.weights == (Fraction(1, 4), Fraction(3, 4))
        with pytest.raises(InvalidMeasureError):
            normalized_measure(two_atom_space, [0, 0])

    def test_support(self, two_atom_space):
        """Test support lists charged atoms."""
        assert Measure(space=two_atom_space, weights=(1, 0)).support() == ("w1",)

    def test_space_mismatch(self, two_atom_space):
        """Test expectations across different atoms are refused."""
        other = FiniteProbSpace.uniform(["a", "b"])
        with pytest.raises(SpaceMismatchError):
            expectation(two_atom_space.reference_measure(), other.random_variable([1, 1]))


class TestRelations:
    """Tests for relate, density_of and mixture."""

    def test_equivalent(self, two_atom_space):
        """Test two full-support measures are equivalent."""
        half = Measure(space=two_atom_space, weights=(Fraction(1, 2), Fraction(1, 2)))
        assert relate(half, two_atom_space.reference_measure()).is_equivalent
        assert is_equivalent_to_reference(half)

    def test_absolutely_continuous_and_singular(self, two_atom_space):
        """Test the witness names the responsible atoms."""
        point = Measure(space=two_atom_space, weights=(1, 0))
        half = Measure(space=two_atom_space, weights=(Fraction(1, 2), Fraction(1, 2)))
        forward = relate(point, half)
        assert forward.kind is RelationKind.ABSOLUTELY_CONTINUOUS
        assert forward.witness == ("w2",)
        backward = relate(half, point)
        assert backward.kind is RelationKind.SINGULAR_PART_PRESENT
        assert backward.witness == ("w2",)
        assert not is_equivalent_to_reference(point)

    def test_density(self, two_atom_space):
        """Test dP/dP0 for P = (1/2, 1/2)."""
        half = Measure(space=two_atom_space, weights=(Fraction(1, 2), Fraction(1, 2)))
        f = density_of(half, two_atom_space.reference_measure())
        assert f.values == (Fraction(5, 6), Fraction(5, 4))

    def test_density_requires_absolute_continuity(self, two_atom_space):
        """Test a charged null atom is reported."""
        point = Measure(space=two_atom_space, weights=(1, 0))
        half = Measure(space=two_atom_space, weights=(Fraction(1, 2), Fraction(1, 2)))
        with pytest.raises(AbsoluteContinuityError) as excinfo:
            density_of(half, point)
        assert excinfo.value.witness == ("w2",)

    def test_mixture(self, two_atom_space):
        """Test (Q + k P1)/(1 + k)."""
        P1 = Measure(space=two_atom_space, weights=(Fraction(3, 10), Fraction(7, 10)))
        P = mixture(two_atom_space.reference_measure(), P1, Fraction(1, 2))
        assert P.weights == (Fraction(1, 2), Fraction(1, 2))
        with pytest.raises(NegativeParameterError):
            mixture(two_atom_space.reference_measure(), P1, -1)


class TestCones:
    """Tests for ConeSpec, combine and span_rank."""

    def test_default_names(self, two_atom_cone):
        """Test generators are named X1.. by default."""
        assert two_atom_cone.names == ("X1",)
        assert two_atom_cone.dimension == 1
        assert not two_atom_cone.is_linear

    def test_combine(self, two_atom_space):
        """Test linear combinations of generators."""
        cone = ConeSpec(
            space=two_atom_space,
            generators=(two_atom_space.random_variable([1, 0]), two_atom_space.random_variable([0, 1])),
        )
        assert combine(cone, [2, 3]).values == (2, 3)
        with pytest.raises(ValueError):
            combine(cone, [-1, 0])
        with pytest.raises(ValueError):
            combine(cone, [1])

    def test_combine_linear_allows_negative(self, two_atom_linear):
        """Test linear spaces take signed coefficients."""
        assert combine(two_atom_linear, [-2]).values == (-2, 2)

    def test_span_rank(self, two_atom_space):
        """Test rank of dependent generators."""
        X = two_atom_space.random_variable([1, -1])
        cone = ConeSpec(space=two_atom_space, generators=(X, 2 * X, -X), kind=ConeKind.LINEAR)
        assert span_rank(cone) == 1

    def test_name_count_mismatch(self, two_atom_space):
        """Test names must match generators."""
        with pytest.raises(ValueError):
            ConeSpec(space=two_atom_space, generators=(two_atom_space.constant(1),), names=("a", "b"))


@st.composite
def variables_on(draw, space):
    """Integer-valued random variables in [-5, 5] on ``space``."""
    values = draw(st.lists(st.integers(-5, 5), min_size=space.size, max_size=space.size))
    return space.random_variable(values)


class TestSpaceProperties:
    """Randomized checks of the expectation and measure operations."""

    @given(spaces(), st.data())
    def test_expectation_is_linear(self, space, data):
        """Test E_P(aX + bY) = a E_P(X) + b E_P(Y) exactly."""
        P = data.draw(equivalent_measures(space))
        X = data.draw(variables_on(space))
        Y = data.draw(variables_on(space))
        a = Fraction(data.draw(st.integers(-4, 4)), data.draw(st.integers(1, 4)))
        b = Fraction(data.draw(st.integers(-4, 4)), data.draw(st.integers(1, 4)))
        assert expectation(P, a * X + b * Y) == a * expectation(P, X) + b * expectation(P, Y)

    @given(spaces(), st.data())
    def test_ess_sup_bounds_expectation(self, space, data):
        """Test ess sup X >= E_P(X) for every P equivalent to P0."""
        P = data.draw(equivalent_measures(space))
        X = data.draw(variables_on(space))
        assert ess_sup(X) >= expectation(P, X)
        assert ess_sup(X) >= expectation(space.reference_measure(), X)

    @given(spaces(), st.data())
    def test_value_decomp_identity(self, space, data):
        """Test X = X+ - X- with both parts nonnegative and disjointly charged."""
        X = data.draw(variables_on(space))
        positive, negative = value_decomp(X)
        assert (positive - negative).values == X.values
        assert positive.is_nonnegative() and negative.is_nonnegative()
        assert (positive * negative).is_zero()
        assert (positive + negative).values == abs(X).values

    @given(spaces(), st.data())
    def test_mixture_stays_equivalent(self, space, data):
        """Test (Q + k P1)/(1 + k) ~ P0 whenever Q ~ P0, for any P1 and k >= 0."""
        Q = data.draw(equivalent_measures(space))
        raw = data.draw(st.lists(st.integers(0, 4), min_size=space.size, max_size=space.size))
        raw[0] += 1
        P1 = normalized_measure(space, raw)
        k = Fraction(data.draw(st.integers(0, 10)), data.draw(st.integers(1, 5)))
        mixed = mixture(Q, P1, k)
        assert is_equivalent_to_reference(mixed)
        assert relate(mixed, space.reference_measure()).kind == RelationKind.EQUIVALENT
        assert sum(mixed.weights) == 1

    @given(spaces(), st.data())
    def test_density_reintegrates(self, space, data):
        """Test E_wrt(f X) = E_P(X) for the density f = dP/d(wrt)."""
        P = data.draw(equivalent_measures(space))
        wrt = data.draw(equivalent_measures(space))
        X = data.draw(variables_on(space))
        f = density_of(P, wrt)
        assert expectation(wrt, f * X) == expectation(P, X)
        assert expectation(wrt, f) == 1
