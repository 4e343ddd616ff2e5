"""Variable-exponent Lebesgue norms, Haar greedy approximation and democracy functions."""

from ._core import (
    ExponentField,
    VlgError,
    analyze,
    best_subset_residual,
    char_norm,
    construct_gamma1,
    construct_gamma2,
    democracy_norm,
    equivalence_ratio,
    estimate_democracy,
    fit_exponent,
    greedy_residual,
    harmonic_mean_exponent,
    linearized_norm,
    log_holder_constant,
    luxemburg_norm,
    mixed_mass_function,
    square_sum_norm,
    synthesize,
)

__all__ = [
    "ExponentField",
    "VlgError",
    "analyze",
    "best_subset_residual",
    "char_norm",
    "construct_gamma1",
    "construct_gamma2",
    "democracy_norm",
    "equivalence_ratio",
    "estimate_democracy",
    "fit_exponent",
    "greedy_residual",
    "harmonic_mean_exponent",
    "linearized_norm",
    "log_holder_constant",
    "luxemburg_norm",
    "mixed_mass_function",
    "square_sum_norm",
    "synthesize",
]
