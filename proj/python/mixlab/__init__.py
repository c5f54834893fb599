"""Mixing times, distances to stationarity and cutoff diagnostics for finite Markov chains."""

from ._core import (
    Error,
    MarkovChain,
    ProductSpec,
    cutoff_scan,
    cycle_chain,
    dense_product_distance,
    distance_curve,
    ehrenfest_chain,
    heat_kernel_matrix,
    hellinger_distance,
    l2_distance,
    lacoin_chain,
    lazy_path_chain,
    load_chain,
    mixing_time,
    model_names,
    prodmixing_bounds,
    product_hellinger,
    product_tv_bracket,
    save_chain,
    spectral_gap,
    stationary_distribution,
    tv_distance,
    two_state_chain,
    validate_chain,
)

__all__ = [name for name in dir() if not name.startswith("_")]
