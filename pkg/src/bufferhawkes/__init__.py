"""bufferhawkes: simulation and analytics for a buffer-regulated
self-exciting limit order book model."""

__version__ = "0.1.0"

from .params import (
    DerivedConstants,
    ModelParams,
    NonPositiveParameter,
    StabilityViolation,
    derived_constants,
    validate_params,
)
from .special import DomainError, borel_pmf, lambert_w0, v_infinity
from .exact import (
    EventLog,
    SimState,
    evolve_lambda,
    next_event,
    path_to_grid,
    simulate_path,
    simulate_stationary_path,
)
from .cluster import (
    ClusterNode,
    ClusterSample,
    ZPath,
    n_counts_at,
    sample_offspring,
    sample_z_infinity,
    simulate_market_orders,
    simulate_z,
)
from .moments import (
    MomentCurves,
    StationaryStats,
    cluster_mean,
    cluster_var,
    cumulant_v,
    first_moments,
    log_mgf_n,
    second_moments,
    stationary_stats,
    var_n_cluster,
)
from .scaling import EstimateRecord, ScalingReport, estimate_params, run_scaling
from .price import PricePath, simulate_price
from .rng import SplitMix64, spawn_seed
from .backend import backend_name

__all__ = [
    "DerivedConstants",
    "ModelParams",
    "NonPositiveParameter",
    "StabilityViolation",
    "derived_constants",
    "validate_params",
    "DomainError",
    "borel_pmf",
    "lambert_w0",
    "v_infinity",
    "EventLog",
    "SimState",
    "evolve_lambda",
    "next_event",
    "path_to_grid",
    "simulate_path",
    "simulate_stationary_path",
    "ClusterNode",
    "ClusterSample",
    "ZPath",
    "n_counts_at",
    "sample_offspring",
    "sample_z_infinity",
    "simulate_market_orders",
    "simulate_z",
    "MomentCurves",
    "StationaryStats",
    "cluster_mean",
    "cluster_var",
    "cumulant_v",
    "first_moments",
    "log_mgf_n",
    "second_moments",
    "stationary_stats",
    "var_n_cluster",
    "EstimateRecord",
    "ScalingReport",
    "estimate_params",
    "run_scaling",
    "PricePath",
    "simulate_price",
    "SplitMix64",
    "spawn_seed",
    "backend_name",
]
