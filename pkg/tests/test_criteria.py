"""Tests for the criteria module.

Tests cover:
- (NA), (a) and (d) verdicts with witnesses
- Minimal constants of (b), (b*) and (b**) with certified optima
- Conversions between the (b*) and (b**) constants
- Condition (c) events and constants
- Agreement of all equivalent verdicts on random instances
- Agreement with brute-force vertex enumeration on tiny instances
- Invariance of the constants under positive rescaling of generators
- Floor and ratio bounds read off band-constrained measures
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.conecert.construct import find_esm, find_esm_in_band
from src.conecert.criteria import (
    ConditionCPair,
    ConstantOutOfRangeError,
    KStatus,
    LinearSpaceRequiredError,
    PreconditionError,
    band_ratio_bound_holds,
    build_condition_c,
    c_min_b_star_star,
    check_condition_a,
    check_condition_d,
    check_na,
    check_no_arbitrage_first_kind,
    convert_c_to_k,
    convert_k_to_c,
    floor_bound_holds,
    has_strictly_positive_member,
    min_k_b,
    min_k_b_star,
    verify_condition_c,
)
from src.conecert.solver import verify_certificate
from src.conecert.space import ConeKind, ConeSpec, Measure

from tests import oracle
from tests.strategies import equivalent_measures, instances


@pytest.fixture
def half(two_atom_space):
    """The uniform measure on the two-atom space."""
    return Measure(space=two_atom_space, weights=(Fraction(1, 2), Fraction(1, 2)))


@pytest.fixture
def positive_cone(two_atom_space):
    """Cone generated by the strictly positive payoff (1, 1)."""
    return ConeSpec(space=two_atom_space, generators=(two_atom_space.random_variable([1, 1]),))


class TestNoArbitrage:
    """Tests for check_na, check_condition_a and check_condition_d."""

    def test_holds_without_arbitrage(self, two_atom_space, two_atom_cone):
        """Test all three conditions hold for X = (1, -1)."""
        for check in (check_na, check_condition_a, check_condition_d):
            report = check(two_atom_space, two_atom_cone)
            assert report.holds
            assert report.witness is None
            assert verify_certificate(report.program, report.outcome)

    def test_na_witness(self, two_atom_space, arbitrage_cone):
        """Test the witness is the arbitrage itself."""
        report = check_na(two_atom_space, arbitrage_cone)
        assert not report.holds
        assert report.witness.values == (1, 0)
        assert verify_certificate(report.program, report.outcome)

    def test_condition_a_witness(self, two_atom_space, arbitrage_cone):
        """Test (a) fails with a nonnegative nonzero witness."""
        report = check_condition_a(two_atom_space, arbitrage_cone)
        assert not report.holds
        assert report.witness.is_nonnegative()
        assert not report.witness.is_zero()

    def test_condition_d_witness(self, two_atom_space, arbitrage_cone):
        """Test (d) fails along a nonnegative ray."""
        report = check_condition_d(two_atom_space, arbitrage_cone)
        assert not report.holds
        assert report.witness.is_nonnegative()
        assert not report.witness.is_zero()
        assert verify_certificate(report.program, report.outcome)

    def test_first_kind_is_condition_d(self, two_atom_space, two_atom_cone):
        """Test no-arbitrage of the first kind matches (d)."""
        assert check_no_arbitrage_first_kind(two_atom_space, two_atom_cone).holds

    def test_to_json(self, two_atom_space, arbitrage_cone):
        """Test serialization of a failing report."""
        report = check_na(two_atom_space, arbitrage_cone)
        data = report.to_dict()
        assert data["condition"] == "NA"
        assert data["witness"] == ["1", "0"]
        assert '"holds": false' in report.to_json()


class TestMinimalConstants:
    """Tests for min_k_b, min_k_b_star and c_min_b_star_star."""

    def test_b_star(self, two_atom_space, two_atom_cone, two_atom_linear):
        """Test minK(b*) = 1/2 under P0."""
        for cone in (two_atom_cone, two_atom_linear):
            report = min_k_b_star(two_atom_space, cone, two_atom_space.reference_measure())
            assert report.status is KStatus.FINITE
            assert report.value == Fraction(1, 2)
            assert verify_certificate(report.program, report.outcome)

    def test_b(self, two_atom_space, two_atom_cone, two_atom_linear):
        """Test minK(b) = 1/5 under P0."""
        for cone in (two_atom_cone, two_atom_linear):
            report = min_k_b(two_atom_space, cone, two_atom_space.reference_measure())
            assert report.value == Fraction(1, 5)
            assert report.bounded_by(Fraction(1, 5))
            assert not report.bounded_by(Fraction(1, 6))

    def test_b_star_star(self, two_atom_space, two_atom_linear):
        """Test c = 1/5 on the linear space, matching k/(k+2) for k = 1/2."""
        report = c_min_b_star_star(two_atom_space, two_atom_linear, two_atom_space.reference_measure())
        assert report.value == Fraction(1, 5)
        assert report.value == convert_k_to_c(Fraction(1, 2))
        assert verify_certificate(report.program, report.outcome)

    def test_b_star_star_needs_linear_space(self, two_atom_space, two_atom_cone):
        """Test (b**) refuses a cone."""
        with pytest.raises(LinearSpaceRequiredError):
            c_min_b_star_star(two_atom_space, two_atom_cone, two_atom_space.reference_measure())

    def test_zero_under_martingale_measure(self, two_atom_space, two_atom_cone, half):
        """Test both constants vanish when Q is a martingale measure."""
        assert min_k_b_star(two_atom_space, two_atom_cone, half).value == 0
        assert min_k_b(two_atom_space, two_atom_cone, half).value == 0

    def test_infinite_with_arbitrage(self, two_atom_space, arbitrage_cone):
        """Test an arbitrage makes the constant infinite."""
        report = min_k_b_star(two_atom_space, arbitrage_cone, two_atom_space.reference_measure())
        assert report.status is KStatus.INFINITE
        assert report.value is None
        assert report.ray_payoff.is_nonnegative()
        assert not report.ray_payoff.is_zero()
        assert verify_certificate(report.program, report.outcome)
        assert report.to_dict()["status"] == "infinite"

    def test_requires_equivalent_measure(self, two_atom_space, two_atom_cone):
        """Test a measure with a null atom is refused."""
        point = Measure(space=two_atom_space, weights=(1, 0))
        with pytest.raises(PreconditionError):
            min_k_b_star(two_atom_space, two_atom_cone, point)
        with pytest.raises(PreconditionError):
            min_k_b(two_atom_space, two_atom_cone, point)


class TestConversions:
    """Tests for convert_k_to_c and convert_c_to_k."""

    @pytest.mark.parametrize("k", [Fraction(0), Fraction(1, 2), Fraction(3), Fraction(100)])
    def test_round_trip(self, k):
        """Test the conversions are mutually inverse."""
        assert convert_c_to_k(convert_k_to_c(k)) == k

    def test_known_values(self):
        """Test k = 1/2 corresponds to c = 1/5."""
        assert convert_k_to_c(Fraction(1, 2)) == Fraction(1, 5)
        assert convert_c_to_k(Fraction(1, 5)) == Fraction(1, 2)

    def test_out_of_range(self):
        """Test c must lie in [0, 1) and k must be nonnegative."""
        with pytest.raises(ConstantOutOfRangeError):
            convert_c_to_k(Fraction(1))
        with pytest.raises(ConstantOutOfRangeError):
            convert_c_to_k(Fraction(-1, 2))
        with pytest.raises(ConstantOutOfRangeError):
            convert_k_to_c(Fraction(-1))


class TestConditionC:
    """Tests for build_condition_c and verify_condition_c."""

    def test_reference_measure(self, two_atom_space, two_atom_cone):
        """Test Q = P0 saturates at n = 1 with k_1 = 6/5."""
        pairs = build_condition_c(two_atom_space, two_atom_cone, two_atom_space.reference_measure(), Fraction(1, 5))
        assert pairs == [ConditionCPair(index=1, atoms=("w1", "w2"), constant=Fraction(6, 5))]
        assert verify_condition_c(two_atom_space, two_atom_cone, pairs)

    def test_events_grow(self, two_atom_space, two_atom_cone, half):
        """Test A_n = {n f >= 1} for f = (5/6, 5/4)."""
        pairs = build_condition_c(two_atom_space, two_atom_cone, half, Fraction(0))
        assert [p.atoms for p in pairs] == [("w2",), ("w1", "w2")]
        assert [p.constant for p in pairs] == [1, 2]
        assert verify_condition_c(two_atom_space, two_atom_cone, pairs)

    def test_explicit_count(self, two_atom_space, two_atom_cone, half):
        """Test more pairs than needed repeat the whole space."""
        pairs = build_condition_c(two_atom_space, two_atom_cone, half, Fraction(0), count=4)
        assert len(pairs) == 4
        assert pairs[-1].atoms == ("w1", "w2")

    def test_constant_too_small(self, two_atom_space, two_atom_cone):
        """Test k below minK(b) is refused."""
        with pytest.raises(PreconditionError):
            build_condition_c(two_atom_space, two_atom_cone, two_atom_space.reference_measure(), Fraction(0))

    def test_positive_member_breaks_condition(self, two_atom_space, positive_cone):
        """Test a strictly positive payoff violates every pair with k_n > 0."""
        assert has_strictly_positive_member(two_atom_space, positive_cone)
        pairs = [ConditionCPair(index=1, atoms=("w1", "w2"), constant=Fraction(1))]
        assert not verify_condition_c(two_atom_space, positive_cone, pairs)

    def test_no_positive_member(self, two_atom_space, two_atom_cone):
        """Test (1, -1) has no strictly positive multiple."""
        assert not has_strictly_positive_member(two_atom_space, two_atom_cone)


class TestBoundChecks:
    """Tests for floor_bound_holds and band_ratio_bound_holds."""

    def test_floor_bound(self, two_atom_space, two_atom_cone):
        """Test the ESM (1/2, 1/2) >= (5/6) P0 gives E_P0(X) <= (6/5) ess sup(-X)."""
        assert floor_bound_holds(two_atom_space, two_atom_cone, Fraction(5, 6))
        assert not floor_bound_holds(two_atom_space, two_atom_cone, Fraction(6))
        with pytest.raises(PreconditionError):
            floor_bound_holds(two_atom_space, two_atom_cone, Fraction(0))

    def test_band_ratio_bound(self, two_atom_space, two_atom_cone):
        """Test the ratio s/r = 3/2 bounds minK(b*) = 1/2."""
        assert band_ratio_bound_holds(two_atom_space, two_atom_cone, Fraction(5, 6), Fraction(5, 4))
        with pytest.raises(PreconditionError):
            band_ratio_bound_holds(two_atom_space, two_atom_cone, Fraction(2), Fraction(1))


@pytest.mark.slow
class TestEquivalentVerdicts:
    """(NA), (a), (d), finite minK(b*) and ESM existence always agree."""

    @settings(max_examples=500, deadline=None)
    @given(instances())
    def test_verdicts_agree(self, cone):
        """Test agreement and certificate validity on random instances."""
        space = cone.space
        reference = space.reference_measure()
        na = check_na(space, cone)
        condition_a = check_condition_a(space, cone)
        condition_d = check_condition_d(space, cone)
        k_star = min_k_b_star(space, cone, reference)
        esm = find_esm(space, cone)

        verdicts = {na.holds, condition_a.holds, condition_d.holds, k_star.is_finite, esm.found}
        assert len(verdicts) == 1
        for report in (na, condition_a, condition_d, k_star):
            assert verify_certificate(report.program, report.outcome)
        assert verify_certificate(esm.program, esm.outcome)
        if not esm.found:
            assert verify_certificate(esm.obstruction_program, esm.obstruction)

    @given(instances(kinds=(ConeKind.LINEAR,)))
    def test_b_star_star_matches_b_star(self, cone):
        """Test convert_c_to_k(c) equals k whenever k is finite."""
        space = cone.space
        reference = space.reference_measure()
        k_star = min_k_b_star(space, cone, reference)
        c = c_min_b_star_star(space, cone, reference)
        if k_star.is_finite:
            assert convert_c_to_k(c.value) == k_star.value
        else:
            assert c.value == 1


class TestBruteForceOracle:
    """Verdicts and constants match exhaustive vertex enumeration."""

    @settings(max_examples=150, deadline=None)
    @given(instances(max_atoms=4, max_generators=3, low=-2, high=2))
    def test_matches_vertex_enumeration(self, cone):
        """Test ESM existence, minK(b) and minK(b*) on tiny instances."""
        space = cone.space
        reference = space.reference_measure()
        assert find_esm(space, cone).found == oracle.esm_exists(cone)
        assert check_na(space, cone).holds == oracle.esm_exists(cone)

        k_b = min_k_b(space, cone, reference)
        expected_b = oracle.min_k_b(cone, reference)
        assert k_b.value == expected_b

        k_star = min_k_b_star(space, cone, reference)
        assert k_star.value == oracle.min_k_b_star(cone, reference)


def _scaled(cone, factors):
    return cone.with_generators([f * g for f, g in zip(factors, cone.generators)])


positive_factors = st.lists(
    st.fractions(min_value=Fraction(1, 5), max_value=5, max_denominator=12), min_size=5, max_size=5
)


class TestScalingInvariance:
    """The constants depend on the cone, not on the length of its generators."""

    @given(instances(max_atoms=5, max_generators=4), positive_factors, st.data())
    def test_min_k_b_and_b_star(self, cone, factors, data):
        """Test minK(b) and minK(b*) are unchanged when each generator is scaled."""
        space = cone.space
        Q = data.draw(equivalent_measures(space))
        scaled = _scaled(cone, factors)
        assert min_k_b(space, scaled, Q).value == min_k_b(space, cone, Q).value
        assert min_k_b_star(space, scaled, Q).value == min_k_b_star(space, cone, Q).value

    @given(instances(max_atoms=5, max_generators=4, kinds=(ConeKind.LINEAR,)), positive_factors)
    def test_c_min_b_star_star(self, cone, factors):
        """Test the (b**) constant of a linear space is unchanged by rescaling."""
        space = cone.space
        reference = space.reference_measure()
        scaled = _scaled(cone, factors)
        assert c_min_b_star_star(space, scaled, reference).value == (
            c_min_b_star_star(space, cone, reference).value
        )


class TestBandChain:
    """A finite (b*) constant yields a band measure whose ratios satisfy both bounds."""

    @given(instances(max_atoms=5, max_generators=4), st.data())
    def test_band_measure_bounds(self, cone, data):
        """Test minK(b*) finite => band ESM found => floor and ratio bounds hold."""
        space = cone.space
        Q = data.draw(equivalent_measures(space))
        k_star = min_k_b_star(space, cone, Q)
        if not k_star.is_finite:
            assert not find_esm(space, cone).found
            return
        band = find_esm_in_band(space, cone, Q, k_star.value)
        assert band.found
        r, s = band.floor_ratio, band.ceiling_ratio
        assert all(
            r * p0 <= p <= s * p0
            for p, p0 in zip(band.measure.weights, space.weights)
        )
        assert floor_bound_holds(space, cone, r)
        assert band_ratio_bound_holds(space, cone, r, s)
