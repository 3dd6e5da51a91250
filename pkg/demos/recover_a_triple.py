"""
Recovering three numbers from c_1, c_3, c_5
============================================

The elimination learns m1, m3 and m5 from the v family and finds steps 2
and 4 degenerate.  Three odd coefficients are still enough to pin down
the multiset whenever no pair sums to zero.
"""

from fractions import Fraction

from scs_lab.sympoly import build_cn
from scs_lab.uniqueness import run_elimination, v_b_coefficients, kod_recover, kod_certificate

b = v_b_coefficients(6)

# which steps add information
state = run_elimination(3, b, 5)
print("degenerate steps:", state.degenerate_steps)

# the identities behind the recovery
cert = kod_certificate(b)
for name, ok in cert.checks:
    print("ok  " if ok else "FAIL", name)

# evaluate at a point, then invert
x = [Fraction(3, 2), Fraction(-2, 7), Fraction(5)]
c1, c3, c5 = (build_cn(3, n, b).evaluate(x) for n in (1, 3, 5))
(e1, e2, e3), roots = kod_recover(c1, c3, c5)
print("e1, e2, e3 =", e1, e2, e3)
print("recovered:", roots)
