"""
Birkhoff sums over a Liouville rotation
========================================

Along a Liouville angle the Birkhoff sums f^(q_k) approach the law nu of
ln(1/(2 sin(pi X))).  Over the golden rotation they do not.
"""

import numpy as np

from scs_lab.rotation import (cf_build_liouville, golden_alpha, empirical_vs_nu,
                              f_tilde_q, limit_profile)

# a_{n+1} = q_n**3 makes the denominators explode
cf = cf_build_liouville(3, 4)
print("q:", cf.q)
print("certified:", all(cf.convergent_bound_ok(n) for n in range(len(cf.q) - 1)))

# KS distance to nu along three convergents
for k in (1, 2, 3):
    r = empirical_vs_nu(cf, 1, k, samples=200_000, seed=k)
    print(f"liouville k={k} q={r['q']:<6} KS={r['ks']:.4f} ({r['method']})")

gold = golden_alpha(20)
for k in (10, 11, 12):
    r = empirical_vs_nu(gold, 1, k, samples=200_000, seed=k)
    print(f"golden    k={k} q={r['q']:<6} KS={r['ks']:.4f}")

# the rational model f_q converges to the limit profile
xs = (np.arange(10_000) + 0.5) / 10_000
for q in (13, 89, 610):
    print(f"q={q:<4} sup error {np.max(np.abs(f_tilde_q(xs, q) - limit_profile(xs))):.2e}")
