"""Bayesian clustering with sparse finite mixtures and Dirichlet process mixtures."""

from ._core import (
    adjusted_rand_index,
    error_rate,
    evidence_table,
    fit,
    load_fear,
    log_gamma_stable,
    log_prior_partition_dpm,
    log_prior_partition_sfm,
    match_prior,
    prior_kplus,
    prob_new_cluster_dpm,
    prob_new_cluster_sfm,
    simulate_lca,
    slice_thresholds,
    sticks_to_weights,
)

__all__ = [
    "adjusted_rand_index",
    "error_rate",
    "evidence_table",
    "fit",
    "load_fear",
    "log_gamma_stable",
    "log_prior_partition_dpm",
    "log_prior_partition_sfm",
    "match_prior",
    "prior_kplus",
    "prob_new_cluster_dpm",
    "prob_new_cluster_sfm",
    "simulate_lca",
    "slice_thresholds",
    "sticks_to_weights",
]

__version__ = "0.1.0"
