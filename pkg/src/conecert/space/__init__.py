"""Finite probability spaces, random variables, cones and measures."""

from src.conecert.space.space import (
    Rational,
    FiniteProbSpace,
    RandomVariable,
    ConeKind,
    ConeSpec,
    Measure,
    MeasureRelation,
    RelationKind,
    InvalidSpaceError,
    InvalidMeasureError,
    SpaceMismatchError,
    NegativeParameterError,
    RationalParseError,
    AbsoluteContinuityError,
    parse_rational,
    expectation,
    ess_sup,
    value_decomp,
    probability,
    relate,
    is_equivalent_to_reference,
    mixture,
    density_of,
    combine,
    span_rank,
    measure_from_weights,
    normalized_measure,
)

__all__ = [
    "Rational",
    "FiniteProbSpace",
    "RandomVariable",
    "ConeKind",
    "ConeSpec",
    "Measure",
    "MeasureRelation",
    "RelationKind",
    "InvalidSpaceError",
    "InvalidMeasureError",
    "SpaceMismatchError",
    "NegativeParameterError",
    "RationalParseError",
    "AbsoluteContinuityError",
    "parse_rational",
    "expectation",
    "ess_sup",
    "value_decomp",
    "probability",
    "relate",
    "is_equivalent_to_reference",
    "mixture",
    "density_of",
    "combine",
    "span_rank",
    "measure_from_weights",
    "normalized_measure",
]
