"""Truncated power series with exact coefficients and the convolution
coefficient formulas built on top of them."""
from dataclasses import dataclass, field
from fractions import Fraction
import math

from .exact import (ScaledRational, SR, gamma_exact, UnsupportedArgument,
                    IncompatibleRadicals)

DEFAULT_ORDER = 21


class DivByZeroSeries(ZeroDivisionError):
    pass


class NonRepresentableSqrt(ArithmeticError):
    pass


class MixedSigns(UnsupportedArgument):
    pass


class ZeroLeadingCoefficient(ValueError):
    pass


def _sr(x):
    return ScaledRational.coerce(x)


class PowerSeries:
    """x**lead_exp * sum(coeffs[n] x**n), truncated at len(coeffs) terms."""

    def __init__(self, coeffs, lead_exp=0):
        self.coeffs = [_sr(c) for c in coeffs]
        self.lead_exp = Fraction(lead_exp)

    @property
    def order(self):
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.lead_exp == other.lead_exp and self.coeffs == other.coeffs

    def __repr__(self):
        head = ", ".join(c.pretty() for c in self.coeffs[:4])
        return f"PowerSeries([{head}, ...], order={self.order}, lead_exp={self.lead_exp})"

    def truncate(self, n):
        return PowerSeries(self.coeffs[:n], self.lead_exp)

    def _check(self, other):
        if self.lead_exp != other.lead_exp:
            raise ValueError("series with different leading exponents")
        return min(self.order, other.order)

    def __add__(self, other):
        n = self._check(other)
        return PowerSeries([a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])],
                           self.lead_exp)

    def __sub__(self, other):
        n = self._check(other)
        return PowerSeries([a - b for a, b in zip(self.coeffs[:n], other.coeffs[:n])],
                           self.lead_exp)

    def __neg__(self):
        return PowerSeries([-c for c in self.coeffs], self.lead_exp)

    def scale(self, c):
        c = _sr(c)
        return PowerSeries([c * a for a in self.coeffs], self.lead_exp)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return self.scale(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n):
            acc = SR(0)
            for i in range(k + 1):
                if a[i].is_zero() or b[k - i].is_zero():
                    continue
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return PowerSeries(out, self.lead_exp + other.lead_exp)

    __rmul__ = __mul__

    def inverse(self):
        c0 = self.coeffs[0] if self.coeffs else SR(0)
        if c0.is_zero():
            raise DivByZeroSeries("series with zero constant term has no inverse")
        n = self.order
        inv0 = c0.inverse()
        out = [inv0]
        for k in range(1, n):
            acc = SR(0)
            for i in range(1, k + 1):
                if self.coeffs[i].is_zero() or out[k - i].is_zero():
                    continue
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-acc * inv0)
        return PowerSeries(out, -self.lead_exp)

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return self.scale(_sr(other).inverse())
        return self * other.inverse()

    def derivative(self):
        if self.lead_exp != 0:
            raise ValueError("derivative only for plain power series")
        return PowerSeries([c * k for k, c in enumerate(self.coeffs)][1:] + [SR(0)])

    def evaluate(self, x):
        """Float value of the truncated sum at x."""
        total = 0.0
        for c in reversed(self.coeffs):
            total = total * x + float(c)
        return total * x ** float(self.lead_exp) if self.lead_exp else total


def series_mul(a, b):
    return a * b


def series_div(a, b):
    return a / b


def series_exp(s):
    """exp of a series with zero constant term."""
    if s.lead_exp != 0:
        raise ValueError("exp needs a plain power series")
    if s.coeffs and not s.coeffs[0].is_zero():
        raise NonRepresentableSqrt("exp of a non-zero constant leaves the exact family")
    n = s.order
    e = [SR(1)]
    for k in range(1, n):
        acc = SR(0)
        for j in range(1, k + 1):
            if s.coeffs[j].is_zero() or e[k - j].is_zero():
                continue
            acc = acc + s.coeffs[j] * e[k - j] * j
        e.append(acc * Fraction(1, k))
    return PowerSeries(e)


def series_sqrt(s):
    """Square root by Newton iteration from the exact root of the constant term."""
    if s.lead_exp.denominator != 1 or s.lead_exp % 2:
        raise NonRepresentableSqrt("leading exponent must be even")
    c0 = s.coeffs[0] if s.coeffs else SR(0)
    if c0.is_zero():
        raise DivByZeroSeries("sqrt of a series with zero constant term")
    r0 = c0.sqrt()
    if r0 is None:
        raise NonRepresentableSqrt(f"sqrt of {c0.pretty()} is not in the exact family")
    plain = PowerSeries(s.coeffs)
    n = s.order
    y = PowerSeries([r0] + [SR(0)] * (n - 1))
    correct = 1
    while correct < n:
        y = (y + plain / y) * Fraction(1, 2)
        correct *= 2
    return PowerSeries(y.coeffs, s.lead_exp / 2)


def exp2x_series(order=DEFAULT_ORDER):
    return PowerSeries([Fraction(2 ** k, math.factorial(k)) for k in range(order)])


def v_series(order=DEFAULT_ORDER):
    """Taylor series of sqrt(x / (exp(2x) - 1)) at 0."""
    # (exp(2x) - 1) / x, shifted by one so the constant term is 2
    e = exp2x_series(order + 1).coeffs
    denom = PowerSeries(e[1:order + 1])
    return series_sqrt(denom.inverse())


def v_coefficients(order=DEFAULT_ORDER):
    return v_series(order).coeffs


# convolution coefficients -------------------------------------------------

def _half(a):
    a = Fraction(a)
    if (2 * a).denominator != 1:
        raise UnsupportedArgument(f"exponent {a} must be an integer or half-integer")
    if a <= -1:
        raise UnsupportedArgument(f"exponent {a} must exceed -1")
    return a


def conv_series_pair(b, a1, c, a2, order=None):
    """Coefficients of (x^a1 sum b_k x^k) * (x^a2 sum c_k x^k) for one-sided
    functions supported on (0, inf).

    Returns a PowerSeries with lead_exp a1 + a2 + 1; coefficient n is
    sum_k b_k c_{n-k} Gamma(k+a1+1) Gamma(n-k+a2+1) / Gamma(n+a1+a2+2).
    """
    a1, a2 = _half(a1), _half(a2)
    b = list(b.coeffs if isinstance(b, PowerSeries) else b)
    c = list(c.coeffs if isinstance(c, PowerSeries) else c)
    n_max = min(len(b), len(c)) if order is None else order
    out = []
    for n in range(n_max):
        acc = SR(0)
        den = gamma_exact(n + a1 + a2 + 2)
        for k in range(n + 1):
            if k >= len(b) or n - k >= len(c):
                continue
            bk, ck = _sr(b[k]), _sr(c[n - k])
            if bk.is_zero() or ck.is_zero():
                continue
            acc = acc + bk * ck * gamma_exact(k + a1 + 1) * gamma_exact(n - k + a2 + 1)
        out.append(acc / den)
    return PowerSeries(out, a1 + a2 + 1)


def compositions(n, d):
    """All (k_1, ..., k_d) of non-negative integers summing to n."""
    if d == 1:
        yield (n,)
        return
    for k in range(n + 1):
        for rest in compositions(n - k, d - 1):
            yield (k,) + rest


@dataclass
class ConvCoefficients:
    """Expansion of a d-fold rescaled convolution next to its singular point.

    For side=+1 the function is, for small x > 0,
        prefactor * sign * x**base * sum(coeffs[n] * x**n)
    and for side=-1 (all scales negative) it is the same expression in the
    signed variable x < 0 with the parity sign applied.  ``coeffs`` are
    computed with the signed scales t_i.  ``prefactor`` is |t_1...t_d|**(-(1+a))
    and is kept symbolic as (base, exponent) because it may leave the exact
    family.
    """
    d: int
    a: Fraction
    t: tuple
    coeffs: list
    base: Fraction
    side: int = 1
    sign: int = 1
    prefactor_base: Fraction = Fraction(1)
    prefactor_exp: Fraction = Fraction(0)
    weights: list = field(default_factory=list)

    @property
    def prefactor(self):
        return float(self.prefactor_base) ** float(self.prefactor_exp)

    def exact_prefactor(self):
        """Prefactor as a ScaledRational when possible, else None."""
        e = self.prefactor_exp
        base = self.prefactor_base
        if e.denominator == 1:
            return SR(base ** int(e))
        if e.denominator == 2:
            r = SR(base).sqrt()
            if r is None:
                return None
            return r ** int(2 * e)
        return None

    def full_coeffs(self):
        """Coefficients including sign and prefactor, exact when possible."""
        p = self.exact_prefactor()
        if p is None:
            raise IncompatibleRadicals("prefactor is not in the exact family")
        return [c * p * self.sign for c in self.coeffs]

    def side_coeffs(self):
        """Coefficients in the variable y = side * x > 0."""
        return [c * self.side ** n for n, c in enumerate(self.coeffs)]

    def evaluate(self, x):
        """Truncated expansion at x on the support side of the singularity."""
        y = self.side * x
        if y <= 0:
            return 0.0
        total = 0.0
        for c in reversed(self.side_coeffs()):
            total = total * y + float(c)
        return self.prefactor * total * y ** float(self.base)


def parity_sign(d, a):
    """Sign picked up when every scale is negative and the expansion is
    written in the signed variable."""
    a = Fraction(a)
    base = d * (1 + a) - 1
    if base.denominator == 1:
        return -1 if int(base) % 2 else 1
    # half-integer base: x**base = x**(base + 1/2) * x**(-1/2), the last
    # factor is absorbed into (t_1...t_d x)**(-1/2)
    k = int(base + Fraction(1, 2))
    return -1 if k % 2 else 1


def conv_series_rescaled(a_coeffs, a, t, order=None):
    """Coefficients of F_{t_1} * ... * F_{t_d} near its singular point.

    F(x) = x**a * sum(a_n x**n) on (0, inf) and F_t(x) = F(x/t)/|t|.  All
    scales must share one sign.
    """
    a = _half(a)
    t = tuple(Fraction(ti) for ti in t)
    d = len(t)
    if d == 0:
        raise ValueError("need at least one scale")
    if any(ti == 0 for ti in t):
        raise UnsupportedArgument("scale t_i = 0")
    side = 1 if t[0] > 0 else -1
    if any((ti > 0) != (side > 0) for ti in t):
        raise MixedSigns("mixed-sign scales: split them and use mixed_sign_combine")
    a_coeffs = [_sr(c) for c in (a_coeffs.coeffs if isinstance(a_coeffs, PowerSeries) else a_coeffs)]
    n_max = len(a_coeffs) if order is None else min(order, len(a_coeffs))
    weights = [a_coeffs[k] * gamma_exact(k + 1 + a) for k in range(n_max)]
    out = []
    for n in range(n_max):
        acc = SR(0)
        for comp in compositions(n, d):
            term = SR(1)
            for ki, ti in zip(comp, t):
                term = term * weights[ki] * (1 / ti) ** ki
                if term.is_zero():
                    break
            acc = acc + term
        out.append(acc / gamma_exact(n + d * (1 + a)))
    T = abs(math.prod(t))
    return ConvCoefficients(d=d, a=a, t=t, coeffs=out, base=d * (1 + a) - 1,
                            side=side, sign=parity_sign(d, a) if side < 0 else 1,
                            prefactor_base=T, prefactor_exp=-(1 + a),
                            weights=weights)


def mixed_sign_combine(pos, neg, order=None):
    """Combine the expansions of a positive-scale block and a negative-scale
    block into the half-integer part of the full convolution.

    One block has an odd number of factors (half-integer exponent, the
    singular block B) and the other an even number (analytic at the
    singular point, C).  Returns the pair (A, -A) as ConvCoefficients in the
    variable of the singular block's side, since which of the two appears
    depends on the side configuration.  An empty block acts as the identity.
    For densities (all a_0 > 0) the convolution itself carries the second
    member on the singular block's side; the odd part W(x) - W(-x) seen
    from the other side recovers the first.
    """
    if neg is None or neg.d == 0:
        return pos
    if pos is None or pos.d == 0:
        return neg
    if pos.a != neg.a or pos.a != Fraction(-1, 2):
        raise UnsupportedArgument("mixed blocks are supported for a = -1/2")
    if (pos.d + neg.d) % 2 == 0:
        raise UnsupportedArgument("mixed blocks need an odd total number of factors")
    sing, anal = (pos, neg) if pos.d % 2 else (neg, pos)
    s = sing.side
    # singular block in its own variable y = s*x > 0: y**base * sum B'_n y**n
    e1, B = sing.base, sing.side_coeffs()
    # analytic block written in the signed variable x: x**base2 * sum c_n x**n
    # (times the parity sign); convert to the variable y = s*x
    base2 = int(anal.base)
    C = [SR(0)] * base2
    for n, c in enumerate(anal.coeffs):
        C.append(c * anal.sign * (s ** (n + base2)))
    # shift the half-integer exponent of the singular block down to -1/2
    shift = int(e1 + Fraction(1, 2))
    B = [SR(0)] * shift + list(B)
    n_max = min(len(B), len(C))
    if order is not None:
        n_max = min(n_max, order)
    a = Fraction(-1, 2)
    A = []
    for n in range(n_max):
        acc = SR(0)
        for k in range(n + 1):
            if C[k].is_zero() or B[n - k].is_zero():
                continue
            acc = acc + (C[k] * B[n - k] * gamma_exact(k + 1)
                         * gamma_exact(a + n - k + 1))
        A.append(acc / gamma_exact(n + a + 2))
    t = sing.t + anal.t
    T = abs(math.prod(t))
    common = dict(d=sing.d + anal.d, a=a, t=t, base=a + 1, side=s,
                  prefactor_base=T, prefactor_exp=Fraction(-1, 2))
    signed = [x * s ** n for n, x in enumerate(A)]
    plus = ConvCoefficients(coeffs=signed, sign=1, **common)
    minus = ConvCoefficients(coeffs=[-x for x in signed], sign=1, **common)
    return plus, minus


def sign_resolve(pair, a0, d):
    """Pick the branch whose leading coefficient has the sign of a0**d and
    strip |t_1...t_d|**(-1/2) and 1/Gamma(n + d/2), giving
    B_n = sum over compositions of prod a_{k_i} Gamma(k_i + 1/2) / t_i**k_i
    with signed scales.
    """
    a0 = _sr(a0)
    if a0.is_zero():
        raise ZeroLeadingCoefficient("a0 = 0 leaves the sign undetermined")
    want = a0.sign() ** d
    if isinstance(pair, ConvCoefficients):
        pair = (pair,)
    chosen = None
    for cand in pair:
        lead = next((c for c in cand.side_coeffs() if not c.is_zero()), None)
        if lead is not None and lead.sign() == want:
            chosen = cand
            break
    if chosen is None:
        raise ValueError("no branch matches the expected leading sign")
    # the d-fold expansion starts at exponent d/2 - 1
    offset = Fraction(d, 2) - 1 - chosen.base
    if offset.denominator != 1 or offset < 0:
        raise ValueError("exponent mismatch between branch and d")
    ys = chosen.side_coeffs()[int(offset):]
    return [c * chosen.side ** m * gamma_exact(m + Fraction(d, 2))
            for m, c in enumerate(ys)]
