"""Constructions of supermartingale measures and dominating variables."""

from src.conecert.construct.construct import (
    BandSpec,
    MeasureCertificate,
    DensityPreconditionError,
    DominationError,
    MixtureRecoveryError,
    single_x_density,
    find_esm_in_band,
    find_esm,
    find_esfa_with_floor,
    rescale_cone,
    deflate_measure,
    inflate_measure,
    dominating_variable,
    recover_mixture_component,
    find_esm_by_rescaling,
)

__all__ = [
    "BandSpec",
    "MeasureCertificate",
    "DensityPreconditionError",
    "DominationError",
    "MixtureRecoveryError",
    "single_x_density",
    "find_esm_in_band",
    "find_esm",
    "find_esfa_with_floor",
    "rescale_cone",
    "deflate_measure",
    "inflate_measure",
    "dominating_variable",
    "recover_mixture_component",
    "find_esm_by_rescaling",
]
