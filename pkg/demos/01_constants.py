"""
Sharp constants at a glance
===========================

Prints the exponent alpha_{n,p}, the kernel constant kappa_{n,p} and their
product identity for a few dimensions, next to the classical Moser and
Adams values where those exist.
"""

import math

from fracmoser.constants import alpha_classical, alpha_np, constants_table, kappa_np

# alpha * kappa^{p'} should equal n for every admissible pair
print(f"{'n':>2} {'p':>5} {'alpha_np':>14} {'kappa_np':>12} {'alpha*kappa^p-prime/n':>22}")
for n in (1, 2, 3, 4):
    for p in (1.5, 2.0, 3.0):
        q = p / (p - 1)
        a, k = alpha_np(n, p), kappa_np(n, p)
        print(f"{n:>2} {p:>5g} {a:>14.10f} {k:>12.8f} {a * k**q / n:>22.16f}")

# for p = 2 and even n the fractional exponent reproduces Adams
for n in (2, 4, 6):
    print(f"n={n}: alpha_np(n, 2) = {alpha_np(n, 2):.12f}, Adams = {alpha_classical(n // 2, n):.12f}")
print(f"4 pi = {4 * math.pi!r}")

# the full table the CLI prints
for key, value in constants_table(2, 2, sigma=1.5, tau=1.0).items():
    print(f"  {key}: {value}")
