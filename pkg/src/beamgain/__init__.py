"""Beam selection gain of a Butler beamforming network versus antenna selection
over Rician fading: exact distributions, stochastic bounds, closed-form
approximations and Monte Carlo validation."""

__version__ = "0.1.0"

from .beams import (
    ArrayConfig,
    BeamPattern,
    beam_gain,
    beam_pattern,
    butler_matrix,
    butler_row,
    equivalent_angle,
    first_beam_direction,
    los_vector,
    majorizing_vector,
    sorted_partial_sums,
)
from .dist import (
    GainCdf,
    RicianParams,
    antenna_selection_cdf,
    antenna_selection_dist,
    beam_selection_cdf,
    beam_selection_dist,
    beam_selection_logcdf,
    bound_q,
    bound_q_quantile,
    bound_w,
    selection_quantile,
    single_beam_cdf,
    theta0_bounds,
    theta0_lower_dist,
    theta0_upper_dist,
)
from .mc import (
    EmpiricalCdf,
    SimConfig,
    ks_distance,
    read_samples,
    run_simulation,
    selection_gains,
    write_samples,
)
from .perf import (
    IntegrationError,
    PerfResult,
    ergodic_capacity,
    ergodic_capacity_approx,
    expected_gain,
    expected_gain_approx,
    growth_diagnostics,
    outage_capacity,
    outage_capacity_approx,
    outage_probability,
    outage_probability_approx,
)
