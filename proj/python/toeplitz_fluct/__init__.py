"""Fluctuations of random band Toeplitz matrices."""

from ._core import (
    ConfigError,
    WorkCapExceeded,
    binomial,
    card_p2tilde_even,
    count_cluster_set,
    count_crosses,
    cov_model_a_b0,
    cov_model_a_general,
    cov_model_b,
    double_factorial,
    enumerate_pair_partitions,
    enumerate_preimages,
    r1,
    r2,
    r3,
    r4,
    reduce_pair,
    run_config,
    sigma2,
    trace_power,
    trace_product_formula,
    wick_joint_prediction,
)

__all__ = [
    "ConfigError",
    "WorkCapExceeded",
    "binomial",
    "card_p2tilde_even",
    "count_cluster_set",
    "count_crosses",
    "cov_model_a_b0",
    "cov_model_a_general",
    "cov_model_b",
    "double_factorial",
    "enumerate_pair_partitions",
    "enumerate_preimages",
    "r1",
    "r2",
    "r3",
    "r4",
    "reduce_pair",
    "run_config",
    "sigma2",
    "trace_power",
    "trace_product_formula",
    "wick_joint_prediction",
]
