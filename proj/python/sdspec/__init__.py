"""Fisher-information and Chernoff-exponent limits for stochastic-displacement spectroscopy."""

from ._core import (
    Setup,
    chernoff_homodyne,
    chernoff_low_snr,
    chernoff_uspc,
    convexity_bound_gaussian,
    convexity_bound_object_size,
    error_prob_bounds,
    fidelity_uspc,
    fisher_flat_closed_form,
    fisher_homodyne,
    fisher_low_snr,
    fisher_uspc,
    flat_band,
    mc_detection,
    mc_estimation,
    mle_homodyne,
    mle_uspc,
    quantum_chernoff,
    quantum_fisher_bound,
    run,
    sample_homodyne_periodogram,
    sample_uspc_counts,
    tabulated,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
