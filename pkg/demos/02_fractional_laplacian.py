"""
Fractional Laplacian by quadrature
==================================

Applies (-Delta)^sigma to the logarithmic kernel, where the answer is known
in closed form, and then cross-checks the quadrature seminorm of a Moser
function against an FFT on a periodic box.
"""

import math

import numpy as np

from fracmoser.constants import OperatorSpec, log_kernel_constant
from fracmoser.fraclap import frac_lap, seminorm_p
from fracmoser.moser import MoserParams, u_eps
from fracmoser.profiles import log_profile
from fracmoser.spectral import GridField, grid_norm_p, riesz, spectral_apply

# log(1/|x|) is mapped to a pure power c |x|^{-2 sigma}
r = np.array([0.5, 1.0, 2.0])
for n, sigma in ((1, 0.25), (2, 0.5), (3, 0.75), (3, 1.25)):
    got = frac_lap(log_profile(n), OperatorSpec(sigma), r)
    want = log_kernel_constant(n, sigma) * r ** (-2 * sigma)
    print(f"n={n} sigma={sigma:<5g} max rel err {np.max(np.abs(got / want - 1)):.2e}")

# two independent routes to the same seminorm
u = u_eps(MoserParams(2, 2, math.exp(-3)))
quad = seminorm_p(u, OperatorSpec(0.5), 2)
field = GridField.from_profile(u, L=8.0, N=2048)
fft = grid_norm_p(spectral_apply(field, riesz(0.5)), 2, tail_decay=3.0)
print(f"seminorm^2: quadrature {quad:.8f}, FFT {fft:.8f}, rel gap {abs(fft / quad - 1):.1e}")
