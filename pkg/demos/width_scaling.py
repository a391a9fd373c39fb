#!/usr/bin/env python3
"""Show that cube concentration cannot be dimension-free.

A Gaussian with equal correlation between all n coordinates (scaled so it
essentially lives inside the cube) concentrates around a half-space only
at width ~ sqrt(n / log n) x the best-possible rate. The demo streams row
sums for growing n, locates the two-thirds quantile t*, and fits the
log-log slope, which should sit near 1/2.

Run: python3 demos/width_scaling.py
"""

import numpy as np

from cube_transport import counterexample_scaling

NS = [256, 1024, 4096]
N = 200000

print(f"equal-correlation width scaling, N = {N} samples per dimension count")
print()
res = counterexample_scaling(NS, n_samples=N, seed=0)

print(f"{'n':>6} {'t*':>10} {'kappa sqrt(n/log n)':>20} {'mass(A)':>9} {'accept':>8}")
for row in res.rows:
    print(f"{row.n:>6} {row.t_star:10.5f} {row.predicted:20.5f} "
          f"{row.mass_fraction:9.4f} {row.acceptance:8.3f}")

print()
print(f"fitted log-log slope of t* vs n: {res.slope:.4f}  (sqrt scaling = 0.5)")
print(f"reference point: t*(1024) = "
      f"{[r.t_star for r in res.rows if r.n == 1024][0]:.5f} (pinned oracle 0.052)")
print()
print("a dimension-free profile would keep t* flat; the growth with n is")
print("the obstruction, and the mass column confirms A holds half the mass")
