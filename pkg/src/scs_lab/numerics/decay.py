"""Grid probes for the two-regime bound
    |F(x)| < A exp(-|x|/A)  for |x| > t,     |F(x)| < A |x|**r  for |x| < t
measured from the singular point of F."""
from dataclasses import dataclass, field
import math

import numpy as np

from .density import hbar_derivative, hbar_derivative_weights, majorant
from .wrap import richardson


class BoundViolation(ArithmeticError):
    pass


def default_grid(lo=1e-8, hi=1e6, n=3000):
    return np.geomspace(lo, hi, n)


@dataclass
class WReport:
    A: float
    r: float
    t: float
    margin: float
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {"A": self.A, "r": self.r, "t": self.t, "margin": self.margin,
                "diagnostics": self.diagnostics}


def _far_excess(absF, s, A):
    """max log(|F| e^{s/A}) - log A; negative means the far bound holds."""
    nz = absF > 0
    if not nz.any():
        return -math.inf
    return float(np.max(np.log(absF[nz]) + s[nz] / A)) - math.log(A)


def probe_W(F, grid=None, r=-0.5, t_candidates=(0.25, 0.5, 1.0, 2.0), A_max=1e4):
    """Smallest A (with r fixed) for which F satisfies the bound on ``grid``.

    F takes distances s > 0 from the singular point.  For a two-sided
    function call it once per side.  Raises BoundViolation when no A up to
    A_max works for any t.
    """
    s = default_grid() if grid is None else np.asarray(grid, dtype=float)
    absF = np.abs(np.asarray(F(s), dtype=float))
    if not np.all(np.isfinite(absF)):
        raise BoundViolation("non-finite values on the probe grid")
    best = None
    for t in t_candidates:
        near = s < t
        far = ~near
        A_near = float(np.max(absF[near] / s[near] ** r)) if near.any() else 0.0
        lo = max(A_near * (1 + 1e-9), 1e-12)
        if not far.any():
            A = lo
        else:
            if _far_excess(absF[far], s[far], A_max) >= 0 or lo > A_max:
                continue
            if _far_excess(absF[far], s[far], lo) < 0:
                A = lo
            else:
                a, b = lo, A_max
                for _ in range(200):
                    m = 0.5 * (a + b)
                    if _far_excess(absF[far], s[far], m) < 0:
                        b = m
                    else:
                        a = m
                    if b - a < 1e-12 * b:
                        break
                A = b
        # relative slack of the tighter of the two regimes
        margin = min(
            float(np.min(1 - absF[near] / (A * s[near] ** r))) if near.any() else math.inf,
            -_far_excess(absF[far], s[far], A) if far.any() else math.inf)
        if best is None or A < best.A:
            best = WReport(A=A, r=r, t=t, margin=margin)
    if best is None:
        raise BoundViolation(f"no A <= {A_max} works for any t in {t_candidates}")
    return best


def hbar_power_probe(n, grid=None):
    """Probe x**n hbar^(n)(x), with the small-x limit of x**(1/2) times the
    majorant x**n e^{2nx}/(e^{2x}-1)**(n+1/2) (expected 2**(-n-1/2)) and its
    large-x decay against e^{-x/2}."""
    rep = probe_W(lambda s: s ** n * hbar_derivative(n, s), grid)
    xs = 1e-3 * 2.0 ** -np.arange(6)
    small, err = richardson(np.sqrt(xs) * majorant(n, xs), [1, 2, 3, 4, 5])
    big = 60.0
    total_weight = sum(abs(w) for w in hbar_derivative_weights(n).values())
    rep.diagnostics = {
        "n": n,
        "small_x_limit": float(small),
        "small_x_expected": 2.0 ** (-n - 0.5),
        "small_x_richardson_error": float(err),
        "large_x_majorant_times_exp_half": float(math.exp(big / 2) * majorant(n, big)),
        "weight_sum": total_weight,
    }
    return rep
