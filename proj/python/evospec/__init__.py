"""Multitaper evolutionary spectra and the PSR / rank-based stationarity tests."""

from ._evospec import (
    chi2_quantile,
    digamma,
    dpss,
    estimate,
    mc_study,
    optimal_curve,
    penalized_K,
    psr_test,
    rs_test,
    simulate,
    trigamma,
)

__all__ = [
    "chi2_quantile",
    "digamma",
    "dpss",
    "estimate",
    "mc_study",
    "optimal_curve",
    "penalized_K",
    "psr_test",
    "rs_test",
    "simulate",
    "trigamma",
]

__version__ = "0.1.0"
