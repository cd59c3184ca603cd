"""Exact decision procedures for (NA) and its equivalent conditions."""

from src.conecert.criteria.criteria import (
    KStatus,
    NaReport,
    KReport,
    ConditionCPair,
    PreconditionError,
    LinearSpaceRequiredError,
    ConstantOutOfRangeError,
    add_coefficients,
    payoff_terms,
    expectation_terms,
    check_na,
    check_condition_a,
    check_condition_d,
    check_no_arbitrage_first_kind,
    min_k_b_star,
    min_k_b,
    c_min_b_star_star,
    convert_k_to_c,
    convert_c_to_k,
    build_condition_c,
    verify_condition_c,
    has_strictly_positive_member,
    floor_bound_holds,
    band_ratio_bound_holds,
)

__all__ = [
    "KStatus",
    "NaReport",
    "KReport",
    "ConditionCPair",
    "PreconditionError",
    "LinearSpaceRequiredError",
    "ConstantOutOfRangeError",
    "add_coefficients",
    "payoff_terms",
    "expectation_terms",
    "check_na",
    "check_condition_a",
    "check_condition_d",
    "check_no_arbitrage_first_kind",
    "min_k_b_star",
    "min_k_b",
    "c_min_b_star_star",
    "convert_k_to_c",
    "convert_c_to_k",
    "build_condition_c",
    "verify_condition_c",
    "has_strictly_positive_member",
    "floor_bound_holds",
    "band_ratio_bound_holds",
]
