"""Executable finite reproductions of the ESM/ESFA counterexamples."""

from src.conecert.casebook.report import (
    CaseReport,
    Claim,
    ClaimStatus,
    render_value,
)
from src.conecert.casebook.cases import (
    CASE_REGISTRY,
    InvalidInputError,
    ValidationError,
    ValidationResult,
    ValidationWarning,
    FiniteDimFtapCase,
    FiniteDimFtapInput,
    SignSequencesCase,
    SignSequencesInput,
    ApproxEsfaCase,
    ApproxEsfaInput,
    NflvrGapCase,
    NflvrGapInput,
    RokhlinSchachermayerCase,
    RokhlinSchachermayerInput,
    DensityInstance,
    random_instance,
    random_density_instance,
    sign_space,
    horizon_space,
    horizon_esm,
    truncated_poisson_weights,
    poisson_pair_space,
    approx_esfa_cone,
    approx_esfa_measure,
    nflvr_grid,
    nflvr_space,
    nflvr_cone,
    run_case,
    case_finite_dim_ftap,
    case_sign_sequences,
    case_approx_esfa,
    case_nflvr_gap,
    case_rokhlin_schachermayer,
)

__all__ = [
    "CaseReport",
    "Claim",
    "ClaimStatus",
    "render_value",
    "CASE_REGISTRY",
    "InvalidInputError",
    "ValidationError",
    "ValidationResult",
    "ValidationWarning",
    "FiniteDimFtapCase",
    "FiniteDimFtapInput",
    "SignSequencesCase",
    "SignSequencesInput",
    "ApproxEsfaCase",
    "ApproxEsfaInput",
    "NflvrGapCase",
    "NflvrGapInput",
    "RokhlinSchachermayerCase",
    "RokhlinSchachermayerInput",
    "DensityInstance",
    "random_instance",
    "random_density_instance",
    "sign_space",
    "horizon_space",
    "horizon_esm",
    "truncated_poisson_weights",
    "poisson_pair_space",
    "approx_esfa_cone",
    "approx_esfa_measure",
    "nflvr_grid",
    "nflvr_space",
    "nflvr_cone",
    "run_case",
    "case_finite_dim_ftap",
    "case_sign_sequences",
    "case_approx_esfa",
    "case_nflvr_gap",
    "case_rokhlin_schachermayer",
]
