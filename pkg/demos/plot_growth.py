"""
How the gains scale with M
==========================

On a beam direction the mean beam selection gain grows linearly in M, while
antenna selection only gains logarithmically.
"""

import math

from beamgain import RicianParams, growth_diagnostics

rho = 10 ** 0.5
for K in (0.0, 1.0):
    print(f"K = {K}")
    rows = growth_diagnostics([2, 4, 8, 16, 32, 64, 128], RicianParams(K), rho)
    print(f"{'M':>4} {'beam E/M':>9} {'ant E/lnM':>10} {'beam C':>8} {'ant C':>8}")
    for r in rows:
        print(f"{r['M']:4d} {r['beam_mean_over_M']:9.4f} {r['antenna_mean_over_lnM']:10.4f} "
              f"{r['beam_capacity']:8.4f} {r['antenna_capacity']:8.4f}")
    print(f"  beam E/M limit K/(K+1) = {K / (K + 1):.4f}; Euler gamma = {0.5772156649:.4f}")
