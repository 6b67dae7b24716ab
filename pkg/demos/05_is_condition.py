"""
Searching for the IS condition
==============================

In one dimension with p = 2 the search scans Moser functions of growing k
and records the scaled exponential functional together with the supremum
of the associated one-variable profile. The supremum is reported next to
the threshold 1/2.
"""

import math

from fracmoser.mt_functionals import is_condition_search

res = is_condition_search(math.inf, k_max=8, k_min=3, stop_at_target=False)
for k, value in res.history:
    print(f"k={k}: M = {value:.5f}")
print(f"sup_t = {res.sup_t:.5f} at t = {res.t_star:.4f}, threshold {res.threshold:g}")
