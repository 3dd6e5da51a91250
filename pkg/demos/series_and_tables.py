"""
Exact series for v and the c_n tables
======================================

Taylor coefficients of v(x) = sqrt(x / (e^{2x} - 1)) in exact arithmetic,
then the d = 3 coefficient polynomials in the monomial symmetric basis.
"""

from scs_lab.exact import SR
from scs_lab.series import v_series, exp2x_series, PowerSeries
from scs_lab.sympoly import build_cn, m_expand
from scs_lab.uniqueness import v_b_coefficients

# the first few coefficients carry a single sqrt(2)
v = v_series(8)
for k, c in enumerate(v.coeffs):
    print(f"a[{k}] = {c.pretty()}")

# v**2 (e^{2x} - 1) / x is exactly 1
quot = PowerSeries(exp2x_series(9).coeffs[1:9])
assert (v * v * quot).coeffs == [SR(1)] + [SR(0)] * 7

# b_k = a_k Gamma(k + 1/2) feed the c_n polynomials
b = v_b_coefficients(6)
for n in range(1, 6):
    terms = " + ".join(f"({c.pretty()})·{lam.label()}" for lam, c in m_expand(build_cn(3, n, b)))
    print(f"c[{n}] = {terms}")
