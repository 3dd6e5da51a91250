"""Exact scalars of the form q * sqrt(2)**s * sqrt(pi)**p * pi**w.

Every Taylor coefficient, Gamma value at a half-integer and convolution
coefficient that shows up in this package lives in this family, so we can
keep everything exact with plain ``Fraction`` arithmetic.
"""
from fractions import Fraction
from math import factorial
import math


class IncompatibleRadicals(ArithmeticError):
    pass


class UnsupportedArgument(ValueError):
    pass


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {x!r}")


class ScaledRational:
    """q * sqrt(2)**s * sqrt(pi)**p * pi**w with s, p in {0, 1}.

    Even powers of sqrt(2) are folded into q. Even powers of sqrt(pi) are
    moved into the integer pi exponent w, never into q. Zero is stored as
    q=0, s=p=w=0.
    """

    __slots__ = ("q", "s", "p", "w")

    def __init__(self, q=0, s=0, p=0, w=0):
        q = _frac(q)
        s, p, w = int(s), int(p), int(w)
        if q == 0:
            s = p = w = 0
        else:
            k, s = divmod(s, 2)
            q = q * Fraction(2) ** k
            k, p = divmod(p, 2)
            w += k
        self.q, self.s, self.p, self.w = q, s, p, w

    # constructors
    @classmethod
    def coerce(cls, x):
        if isinstance(x, ScaledRational):
            return x
        return cls(_frac(x))

    @classmethod
    def sqrt2(cls):
        return cls(1, 1, 0, 0)

    @classmethod
    def sqrtpi(cls):
        return cls(1, 0, 1, 0)

    @classmethod
    def pi(cls):
        return cls(1, 0, 0, 1)

    @property
    def radical(self):
        return (self.s, self.p, self.w)

    def is_zero(self):
        return self.q == 0

    def is_rational(self):
        return self.radical == (0, 0, 0)

    def compatible(self, other):
        other = ScaledRational.coerce(other)
        return self.is_zero() or other.is_zero() or self.radical == other.radical

    # arithmetic
    def __add__(self, other):
        try:
            other = ScaledRational.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.radical != other.radical:
            raise IncompatibleRadicals(f"{self!r} + {other!r}")
        return ScaledRational(self.q + other.q, *self.radical)

    __radd__ = __add__

    def __neg__(self):
        return ScaledRational(-self.q, self.s, self.p, self.w)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = ScaledRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ScaledRational.coerce(other) - self

    def __mul__(self, other):
        try:
            other = ScaledRational.coerce(other)
        except TypeError:
            return NotImplemented
        return ScaledRational(self.q * other.q, self.s + other.s,
                              self.p + other.p, self.w + other.w)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return ScaledRational(1 / self.q, -self.s, -self.p, -self.w)

    def __truediv__(self, other):
        try:
            other = ScaledRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return ScaledRational.coerce(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return ScaledRational(self.q ** n, self.s * n, self.p * n, self.w * n)

    def sqrt(self):
        """Exact square root, or None when it leaves the family."""
        if self.is_zero():
            return ScaledRational(0)
        if self.q < 0 or self.p != 0:
            return None
        q = self.q
        num, den = q.numerator, q.denominator
        s2 = self.s
        # pull factors of 2 out so the odd parts can be tested for squares
        e_num = (num & -num).bit_length() - 1
        e_den = (den & -den).bit_length() - 1
        num >>= e_num
        den >>= e_den
        e2 = e_num - e_den
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn != num or rd * rd != den:
            return None
        # (rn/rd)^2 * sqrt2**(2*e2 + s2) * sqrtpi**(2w)
        t = 2 * e2 + s2
        if t % 2:
            return None
        return ScaledRational(Fraction(rn, rd), t // 2, self.w, 0)

    # comparisons
    def __eq__(self, other):
        try:
            other = ScaledRational.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.q, self.s, self.p, self.w) == (other.q, other.s, other.p, other.w)

    def __hash__(self):
        return hash((self.q, self.s, self.p, self.w))

    def __float__(self):
        if self.is_zero():
            return 0.0
        return (float(self.q) * math.sqrt(2) ** self.s
                * math.sqrt(math.pi) ** self.p * math.pi ** self.w)

    def sign(self):
        return (self.q > 0) - (self.q < 0)

    def to_mpf(self, dps=None):
        import mpmath
        with mpmath.workdps(dps or mpmath.mp.dps):
            ctx = mpmath.mp
            return (ctx.mpf(self.q.numerator) / self.q.denominator
                    * ctx.sqrt(2) ** self.s * ctx.sqrt(ctx.pi) ** self.p
                    * ctx.pi ** self.w)

    def to_json(self):
        return {"q": f"{self.q.numerator}/{self.q.denominator}",
                "sqrt2": self.s, "sqrtpi": self.p, "pi": self.w}

    @classmethod
    def from_json(cls, d):
        return cls(Fraction(d["q"]), d.get("sqrt2", 0), d.get("sqrtpi", 0),
                   d.get("pi", 0))

    def __repr__(self):
        return f"ScaledRational({self.q}, s={self.s}, p={self.p}, w={self.w})"

    def pretty(self):
        """Human form such as -(√2/16)·π^{3/2}."""
        if self.is_zero():
            return "0"
        neg = self.q < 0
        q = abs(self.q)
        num = str(q.numerator)
        if self.s:
            num = "√2" if num == "1" else num + "√2"
        core = num if q.denominator == 1 else f"{num}/{q.denominator}"
        half = 2 * self.w + self.p  # exponent of pi times 2
        if half == 0:
            pipart = ""
        elif half == 2:
            pipart = "π"
        elif half == 1:
            pipart = "√π"
        elif half % 2 == 0:
            pipart = f"π^{half // 2}"
        else:
            pipart = f"π^{{{half}/2}}"
        if pipart:
            if core == "1":
                body = pipart
            else:
                body = f"({core})·{pipart}" if ("/" in core or "√" in core) else f"{core}·{pipart}"
        else:
            body = core
        return ("−" + body) if neg else body

    __str__ = pretty


SR = ScaledRational


def gamma_half(k):
    """Gamma(k + 1/2) = (2k)! / (4**k k!) * sqrt(pi), k >= 0."""
    if not isinstance(k, int) or k < 0:
        raise UnsupportedArgument(f"gamma_half needs a non-negative integer, got {k!r}")
    return ScaledRational(Fraction(factorial(2 * k), 4 ** k * factorial(k)), 0, 1)


def gamma_exact(x):
    """Gamma at a positive integer or positive half-integer."""
    x = _frac(x) if not isinstance(x, Fraction) else x
    if x <= 0:
        raise UnsupportedArgument(f"gamma_exact needs a positive argument, got {x}")
    if x.denominator == 1:
        return ScaledRational(factorial(x.numerator - 1))
    if x.denominator == 2:
        return gamma_half((x.numerator - 1) // 2)
    raise UnsupportedArgument(f"gamma_exact: {x} is not an integer or half-integer")


def beta_ratio(a1, a2):
    """Gamma(a1+1) Gamma(a2+1) / Gamma(a1+a2+2)."""
    a1, a2 = _frac(a1), _frac(a2)
    for a in (a1, a2):
        if (2 * a).denominator != 1:
            raise UnsupportedArgument(f"beta_ratio: {a} is not an integer or half-integer")
        if a <= -1:
            raise UnsupportedArgument(f"beta_ratio: exponent {a} must exceed -1")
    return gamma_exact(a1 + 1) * gamma_exact(a2 + 1) / gamma_exact(a1 + a2 + 2)
