"""
Selection gain distributions and their bounds
=============================================

Beam selection beats antenna selection whenever there is a line of sight.
The gain is stochastically largest on a beam direction and smallest midway
between two beams, and both extremes have simple product-form bounds.
"""

import numpy as np

from beamgain import (
    ArrayConfig,
    RicianParams,
    antenna_selection_cdf,
    beam_selection_cdf,
    bound_q,
    first_beam_direction,
    theta0_bounds,
)

rician = RicianParams.from_db(0.0)
cfg = ArrayConfig(8)
nu = first_beam_direction(cfg)
x = np.linspace(0.5, 8.0, 8)

print("M = 8, K = 0 dB")
print(f"{'x':>5} {'antenna':>9} {'beam(0)':>9} {'beam(nu)':>9} {'Q_M':>9}")
for xi, g, f0, fn, q in zip(
    x,
    antenna_selection_cdf(x, cfg, rician),
    beam_selection_cdf(x, 0.0, cfg, rician),
    beam_selection_cdf(x, nu, cfg, rician),
    bound_q(x, cfg.M, rician),
):
    print(f"{xi:5.2f} {g:9.5f} {f0:9.5f} {fn:9.5f} {q:9.5f}")

# the broadside sandwich tightens as the array grows
for M in (8, 32, 128):
    c = ArrayConfig(M)
    grid = np.linspace(0.0, 1.2 * M, 2000)
    upper, lower = theta0_bounds(grid, c, rician)
    F = beam_selection_cdf(grid, 0.0, c, rician)
    print(f"M={M:4d}  sup(upper-F)={np.max(upper - F):.2e}  sup(F-lower)={np.max(F - lower):.2e}")
