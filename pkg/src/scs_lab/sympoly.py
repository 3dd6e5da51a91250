"""Symmetric polynomials in d variables with exact coefficients.

A polynomial is a dict from exponent tuples (length d) to ScaledRational.
Symmetric ones are usually handled in the monomial symmetric basis m_lambda.
"""
from fractions import Fraction
from itertools import permutations
import math

from .exact import ScaledRational, SR


def _sr(x):
    return ScaledRational.coerce(x)


class Partition(tuple):
    """Weakly decreasing tuple of positive ints."""

    def __new__(cls, parts=()):
        parts = tuple(sorted((int(p) for p in parts if p), reverse=True))
        if any(p < 0 for p in parts):
            raise ValueError("negative part")
        return super().__new__(cls, parts)

    @property
    def weight(self):
        return sum(self)

    @property
    def length(self):
        return len(self)

    def label(self):
        return "m" + ("".join(str(p) for p in self) if all(p < 10 for p in self)
                      else "_" + "_".join(str(p) for p in self))

    def padded(self, d):
        if len(self) > d:
            raise ValueError(f"{self} has more than {d} parts")
        return tuple(self) + (0,) * (d - len(self))


def partitions_le(n, d=None):
    """Partitions of n with at most d parts, lexicographically descending."""
    d = n if d is None else d
    out = []

    def rec(rem, cap, acc):
        if rem == 0:
            out.append(Partition(acc))
            return
        if len(acc) == d:
            return
        for p in range(min(rem, cap), 0, -1):
            rec(rem - p, p, acc + [p])

    if n == 0:
        return [Partition(())]
    rec(n, n, [])
    return out


class SymPoly:
    """Polynomial in d variables; terms map exponent tuples to coefficients."""

    def __init__(self, d, terms=None):
        self.d = d
        self.terms = {}
        for e, c in (terms or {}).items():
            c = _sr(c)
            if not c.is_zero():
                self.terms[tuple(e)] = c

    @classmethod
    def constant(cls, d, c):
        return cls(d, {(0,) * d: c})

    @classmethod
    def variable(cls, d, i):
        e = [0] * d
        e[i] = 1
        return cls(d, {tuple(e): 1})

    def copy(self):
        return SymPoly(self.d, dict(self.terms))

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, SymPoly):
            return self.d == other.d and self.terms == other.terms
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, SymPoly):
            other = SymPoly.constant(self.d, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, SR(0)) + c
            if v.is_zero():
                out.pop(e, None)
            else:
                out[e] = v
        return SymPoly(self.d, out)

    __radd__ = __add__

    def __neg__(self):
        return SymPoly(self.d, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SymPoly):
            other = SymPoly.constant(self.d, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SymPoly):
            c = _sr(other)
            return SymPoly(self.d, {e: c * v for e, v in self.terms.items()})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, SR(0)) + c1 * c2
                if v.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = v
        return SymPoly(self.d, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        result = SymPoly.constant(self.d, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def is_symmetric(self):
        for e, c in self.terms.items():
            for perm in set(permutations(e)):
                if self.terms.get(perm) != c:
                    return False
        return True

    def to_m_basis(self):
        """Coefficients on m_lambda; raises if the polynomial is not symmetric."""
        if not self.is_symmetric():
            raise ValueError("polynomial is not symmetric")
        out = {}
        for e, c in self.terms.items():
            lam = Partition(e)
            if e == lam.padded(self.d):
                out[lam] = c
        return out

    def evaluate(self, xs):
        """Exact value at rational or ScaledRational points."""
        xs = [_sr(x) for x in xs]
        total = SR(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(xs, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    def evaluate_float(self, xs):
        total = 0.0
        for e, c in self.terms.items():
            total += float(c) * math.prod(x ** k for x, k in zip(xs, e))
        return total

    def __repr__(self):
        return f"SymPoly(d={self.d}, {len(self.terms)} terms)"


def poly_add(a, b):
    return a + b


def poly_mul(a, b):
    return a * b


def poly_sub(a, b):
    return a - b


def poly_pow(a, k):
    return a ** k


def monomial_sym(lam, d):
    """m_lambda in d variables: sum over distinct permutations of x^lambda."""
    lam = Partition(lam)
    if lam.length > d:
        return SymPoly(d)
    exps = set(permutations(lam.padded(d)))
    return SymPoly(d, {e: 1 for e in exps})


def from_m_basis(combo, d):
    """Build a SymPoly from {partition: coefficient}."""
    out = SymPoly(d)
    for lam, c in combo.items():
        out = out + monomial_sym(lam, d) * c
    return out


def power_sum(k, d):
    return monomial_sym((k,), d)


def build_cn(d, n, b):
    """c_n = sum over partitions lambda of n with at most d parts of
    b_0**(d - l(lambda)) * prod_j b_{lambda_j} * m_lambda."""
    b = [_sr(x) for x in b]
    if n >= len(b):
        raise ValueError(f"need b_0..b_{n}, got {len(b)} values")
    out = SymPoly(d)
    for lam in partitions_le(n, d):
        c = b[0] ** (d - lam.length)
        for part in lam:
            c = c * b[part]
        out = out + monomial_sym(lam, d) * c
    return out


def cn_direct(d, n, b):
    """Oracle for build_cn: sum over compositions of prod b_{k_i} x_i**k_i."""
    from .series import compositions
    b = [_sr(x) for x in b]
    terms = {}
    for comp in compositions(n, d):
        c = SR(1)
        for k in comp:
            c = c * b[k]
        terms[comp] = terms.get(comp, SR(0)) + c
    return SymPoly(d, terms)


def verify_identity(lhs, rhs):
    """Exact equality after expansion; returns (ok, residual)."""
    residual = lhs - rhs
    return residual.is_zero(), residual


def m_expand(poly):
    """m-basis coefficients as a list of (partition, coeff), ascending
    lexicographic order (m_111 before m_21 before m_3)."""
    basis = poly.to_m_basis()
    return sorted(basis.items(), key=lambda kv: tuple(kv[0]))


def elementary_from_m(m_values, d):
    """e_k = m_{1^k}; returns [e_1, ..., e_d] from a dict of known values."""
    return [m_values.get(Partition((1,) * k)) for k in range(1, d + 1)]


def power_sum_expansion(mu, d):
    """prod_j p_{mu_j} in the m basis (integer coefficients)."""
    poly = SymPoly.constant(d, 1)
    for part in mu:
        poly = poly * power_sum(part, d)
    return {lam: c.q for lam, c in poly.to_m_basis().items()}


def multinomial_power_coeffs(n, d):
    """m_1**n in the m basis: coefficient of m_lambda is n! / prod(lambda_j!)."""
    out = {}
    for lam in partitions_le(n, d):
        out[lam] = Fraction(math.factorial(n), math.prod(math.factorial(p) for p in lam))
    return out
