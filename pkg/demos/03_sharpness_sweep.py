"""
Moser family and sharpness
==========================

Builds the concentrating family u_eps with eps = e^{-k} and watches two
things as k grows: the normalized seminorm drifts down to 1 like 1/k, and
the exponential integral stays bounded below, so any weight that grows at
infinity makes the weighted functional blow up.

Takes about half a minute.
"""

from fracmoser.moser import MoserParams, plateau_value, u_eps
from fracmoser.mt_functionals import WeightFn, sharpness_sweep

params = MoserParams.from_k(2, 2, 4)
u = u_eps(params)
print(f"eps = {params.eps:.4g}, plateau u(0) = {plateau_value(params):.6f}")
print("u on a few radii:", [round(float(v), 5) for v in u(params.breakpoints)])

rows = sharpness_sweep(2, 2, range(2, 8), WeightFn("power", 2.0))
print(f"{'k':>3} {'seminorm^2':>12} {'(s^2-1)k':>10} {'I_eps':>8} {'weighted':>9}")
for row in rows:
    print(f"{row.k:>3} {row.seminorm_p:>12.6f} {(row.seminorm_p - 1) * row.k:>10.5f} "
          f"{row.I_eps:>8.5f} {row.weighted:>9.5f}")
