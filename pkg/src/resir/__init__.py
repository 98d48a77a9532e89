"""Sampling importance resampling with antithetic and Latin hypercube resampling."""

__version__ = "0.1.0"

from .rng import RngStream, antithetic_uniforms, child_stream, next_uniform, stratified_uniforms
from .sir import (
    DegeneratePoolError,
    Scheme,
    WeightedPool,
    build_pool,
    effective_sample_size,
    inverse_cdf_index,
    pool_from_log_weights,
    resample,
    resample_antithetic,
    resample_lhs,
    resample_plain,
)

__all__ = [
    "RngStream", "antithetic_uniforms", "child_stream", "next_uniform", "stratified_uniforms",
    "DegeneratePoolError", "Scheme", "WeightedPool", "build_pool", "effective_sample_size",
    "inverse_cdf_index", "pool_from_log_weights", "resample", "resample_antithetic",
    "resample_lhs", "resample_plain",
]
