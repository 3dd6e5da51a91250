"""
Convolving singular densities
==============================

h_1 * h_2 has a square-root free edge: its leading coefficients can be
read off the numerical convolution and compared with the exact series.
Wrapping mod 1 keeps the edge coefficient, which Richardson extrapolation
recovers.
"""

import math
from fractions import Fraction

from scs_lab.numerics import Density, Convolution, Wrapped, edge_coefficients, recover_A0_A1
from scs_lab.series import conv_series_rescaled, v_coefficients

# exact expansion next to the edge
cc = conv_series_rescaled(v_coefficients(12), Fraction(-1, 2), [1, 2])
exact = [cc.prefactor * float(c) for c in cc.coeffs[:4]]

# the same numbers from quadrature samples
numeric = edge_coefficients(Density("hbar", 1), Density("hbar", 2))
for n, (e, g) in enumerate(zip(exact, numeric)):
    print(f"C{n}: exact {e:.12f}  numeric {g:.12f}  rel {abs(g - e) / abs(e):.1e}")

# wrap h_1 * h_1 and read A0 at the edge
c = Convolution(Density("h", 1), Density("h", 1))
rec = recover_A0_A1(Wrapped(c), 0.0, center=(c.edge + 0.5) % 1 - 0.5, with_A1=False)
want = (2 / math.pi) ** 2 * float(conv_series_rescaled(v_coefficients(4), Fraction(-1, 2), [1, 1]).coeffs[0])
print(f"A0 recovered {rec.A0:.10f}, expected {want:.10f}")
