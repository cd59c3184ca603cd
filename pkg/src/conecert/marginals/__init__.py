"""Couplings with prescribed marginals on finite products."""

from src.conecert.marginals.marginals import (
    ProductSpace,
    MarginalPair,
    ProductSpaceError,
    cell_label,
    build_marginal_cone,
    couple_with_marginals,
    evaluate_inf_criterion,
)

__all__ = [
    "ProductSpace",
    "MarginalPair",
    "ProductSpaceError",
    "cell_label",
    "build_marginal_cone",
    "couple_with_marginals",
    "evaluate_inf_criterion",
]
