"""
Ground states on the Nehari set
===============================

Discretizes the critical exponential problem on the unit square (Laplacian)
and on the unit interval (half Laplacian with the Gagliardo stiffness),
computes the first eigenvalue and minimizes the energy on the Nehari set.
"""

import math

from fracmoser.nehari import ProblemParams, assemble_space, lambda1, minimize_on_S

for dim, h, ceiling in ((2, 1 / 32, 2 * math.pi), (1, 1 / 128, math.pi / 2)):
    space = assemble_space(dim, h)
    lam1, eig = lambda1(space)
    res = minimize_on_S(space, ProblemParams(0.5 * lam1, 1.0), seed=eig, lam1=lam1)
    print(f"dim={dim} h=1/{round(1 / h)}: lambda1 = {lam1:.6f}")
    print(f"  J = {res.J_val:.6f} (ceiling {ceiling:.6f}), iterations {res.iterations}, "
          f"weak residual {res.weak_residual:.1e}")
    print("  J history:", [round(float(j), 6) for j in res.j_history[:6]], "...")
