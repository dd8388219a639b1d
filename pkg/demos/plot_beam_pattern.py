"""
Beam pattern of a four-port Butler network
==========================================

Each beam of the network peaks at its own azimuth. Between two peaks the
line-of-sight energy is shared, and the per-beam gains always sum to M.
"""

import numpy as np

from beamgain import ArrayConfig, beam_pattern, first_beam_direction, majorizing_vector

cfg = ArrayConfig(4, spacing=0.5)
nu = first_beam_direction(cfg)
print(f"first beam direction nu = {nu:.6f} rad ({np.degrees(nu):.3f} deg)")

# sweep from broadside to the first beam direction
print(f"{'theta':>8} " + " ".join(f"gamma_{m}" for m in range(1, 5)) + "    sum")
for theta in np.linspace(0.0, nu, 6):
    g = beam_pattern(theta, cfg).gammas
    print(f"{theta:8.4f} " + " ".join(f"{v:7.4f}" for v in g) + f" {g.sum():7.4f}")

# at broadside the two outer beams carry the majorizing level a_M
a, b = majorizing_vector(cfg)
print(f"a_4 = {a:.6f}, b_4 = {b:.6f}")

# the two levels grow linearly in M
for M in (16, 128, 1024):
    a, b = majorizing_vector(ArrayConfig(M))
    print(f"M={M:5d}  a/M={a / M:.6f}  b/M={b / M:.6f}")
print(f"limits     4/pi^2={4 / np.pi**2:.6f}  1/2-4/pi^2={0.5 - 4 / np.pi**2:.6f}")
