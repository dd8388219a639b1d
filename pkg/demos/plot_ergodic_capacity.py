"""
Ergodic capacity against array size
===================================

Exact capacities come from integrating the survival function. The closed
forms plug the mean gain into log2(1 + rho x) and close in on the exact
curves as M grows.
"""

import math

from beamgain import ArrayConfig, RicianParams, ergodic_capacity, ergodic_capacity_approx

rician = RicianParams.from_db(0.0)
rho = 10 ** (5.0 / 10)

print("K = 0 dB, rho = 5 dB")
print(f"{'M':>4} {'exact nu':>9} {'approx nu':>10} {'exact 0':>9} {'approx 0':>9}")
for M in (2, 4, 8, 16, 32, 64):
    cfg = ArrayConfig(M)
    e_nu = ergodic_capacity("nu", cfg, rician, rho)
    a_nu = ergodic_capacity_approx("nu", cfg, rician, rho)
    e_0 = ergodic_capacity("zero", cfg, rician, rho)
    a_0 = ergodic_capacity_approx("zero", cfg, rician, rho) if M >= 4 else math.nan
    print(f"{M:4d} {e_nu:9.4f} {a_nu:10.4f} {e_0:9.4f} {a_0:9.4f}")
