"""The densities h, hbar and their rescalings as one-sided kernels.

A kernel supported on one side of an ``edge`` is described in the distance
coordinate s = side * (x - edge) > 0 by

    f(x) = s**exponent * reg(s)

with ``reg`` smooth up to s = 0.  Convolution, wrapping and the decay probes
all work with this description.
"""
from functools import lru_cache
import math

import numpy as np

LN2 = math.log(2.0)


def hbar(x):
    """1/sqrt(exp(2x) - 1) for x > 0, +inf at the singular point 0 and 0
    for x < 0."""
    x = np.asarray(x, dtype=float)
    out = np.where(x == 0, np.inf, 0.0)
    pos = x > 0
    xp = x[pos]
    out[pos] = np.exp(-xp) / np.sqrt(-np.expm1(-2 * xp))
    return out if out.ndim else float(out)


def h(x):
    """(2/pi) (4 exp(2x) - 1)**(-1/2) for x > -ln 2 and 0 elsewhere."""
    x = np.asarray(x, dtype=float)
    return (2 / math.pi) * hbar(x + LN2)


def eval_density(kind, x):
    """Evaluate 'hbar' or 'h' at x."""
    if kind == "hbar":
        return hbar(x)
    if kind == "h":
        return h(x)
    raise ValueError(f"unknown density {kind!r}")


def v_func(u):
    """sqrt(u / (exp(2u) - 1)), equal to 1/sqrt(2) at u = 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < 1e-8
    out[small] = (1 - u[small] / 2) / math.sqrt(2)
    big = ~small
    ub = u[big]
    with np.errstate(over="ignore", invalid="ignore"):
        out[big] = np.sqrt(ub) * np.exp(-ub) / np.sqrt(-np.expm1(-2 * ub))
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def hbar_derivative_weights(n):
    """Weights w_k with hbar^(n)(x) = sum_k w_k exp(2kx) / (exp(2x)-1)**(n+1/2).

    Differentiating exp(2kx)/(exp(2x)-1)**(n+1/2) gives
    -2k exp(2kx) + (2k - 2n - 1) exp(2(k+1)x) over (exp(2x)-1)**(n+3/2).
    """
    if n < 0:
        raise ValueError("order must be non-negative")
    w = {0: 1}
    for m in range(n):
        nxt = {}
        for k, wk in w.items():
            if k:
                nxt[k] = nxt.get(k, 0) - 2 * k * wk
            nxt[k + 1] = nxt.get(k + 1, 0) + (2 * k - 2 * m - 1) * wk
        w = {k: c for k, c in nxt.items() if c}
    return dict(sorted(w.items()))


def hbar_derivative(n, x):
    """hbar^(n)(x) for x > 0, evaluated without overflow."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    denom = (-np.expm1(-2 * xp)) ** (n + 0.5)
    acc = np.zeros_like(xp)
    for k, wk in hbar_derivative_weights(n).items():
        acc += wk * np.exp(-(2 * (n - k) + 1) * xp)
    out[pos] = acc / denom
    return out if out.ndim else float(out)


def majorant(n, x):
    """x**n exp(2nx) / (exp(2x)-1)**(n+1/2), the bound shape for x**n hbar^(n)."""
    x = np.asarray(x, dtype=float)
    return x ** n * np.exp(-x) / (-np.expm1(-2 * x)) ** (n + 0.5)


class Kernel:
    """Base class for one-sided kernels.

    Subclasses provide ``reg(s)`` and optionally ``deriv_x(x, k)``.
    ``tail`` is (amp, rate) with |f(x)| <= amp * exp(-rate * s) for s >= 1.
    """
    side = 1
    edge = 0.0
    exponent = -0.5
    tail = (1.0, 1.0)

    def reg(self, s):
        raise NotImplementedError

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        s = self.side * (x - self.edge)
        out = np.zeros_like(s)
        pos = s > 0
        sp = s[pos]
        out[pos] = sp ** self.exponent * self.reg(sp) if self.exponent else self.reg(sp)
        return out if out.ndim else float(out)

    def support(self):
        return (self.edge, math.inf) if self.side > 0 else (-math.inf, self.edge)

    def deriv_x(self, x, k):
        raise NotImplementedError(f"{type(self).__name__} has no derivative")

    def deriv_s(self, s, k):
        """k-th derivative of s -> f(edge + side*s)."""
        x = self.edge + self.side * np.asarray(s, dtype=float)
        return self.side ** k * self.deriv_x(x, k)


class Density(Kernel):
    """weight/|t| * hbar((x - edge)/t).

    kind='hbar' gives the rescaled hbar_t with edge 0 and weight 1;
    kind='h' gives h_t(x) = h(x/t)/|t| with edge -t ln 2 and weight 2/pi.
    """

    def __init__(self, kind="hbar", t=1.0, weight=None, shift=0.0):
        if t == 0:
            raise ValueError("scale must be non-zero")
        self.kind = kind
        self.t = float(t)
        self.side = 1 if t > 0 else -1
        if kind == "hbar":
            self.edge = 0.0 + shift
            self.weight = 1.0 if weight is None else weight
        elif kind == "h":
            self.edge = -self.t * LN2 + shift
            self.weight = 2 / math.pi if weight is None else weight
        else:
            raise ValueError(f"unknown density {kind!r}")
        self.exponent = -0.5
        at = abs(self.t)
        self.tail = (self.weight / at / math.sqrt(-math.expm1(-2.0 / at)), 1.0 / at)

    def reg(self, s):
        at = abs(self.t)
        return self.weight / math.sqrt(at) * v_func(np.asarray(s) / at)

    def deriv_x(self, x, k):
        u = (np.asarray(x, dtype=float) - self.edge) / self.t
        return self.weight / abs(self.t) * self.t ** (-k) * hbar_derivative(k, u)

    def mass(self):
        return self.weight * math.pi / 2

    def __repr__(self):
        return f"Density({self.kind!r}, t={self.t})"


class SmoothKernel(Kernel):
    """Kernel from explicit callables, mostly for tests.

    ``reg`` is given in the distance coordinate; ``derivs(x, k)`` gives the
    k-th x-derivative on the support.
    """

    def __init__(self, reg, side=1, edge=0.0, exponent=0.0, derivs=None,
                 tail=(1.0, 1.0)):
        self._reg = reg
        self.side = side
        self.edge = float(edge)
        self.exponent = exponent
        self._derivs = derivs
        self.tail = tail

    def reg(self, s):
        return self._reg(np.asarray(s, dtype=float))

    def deriv_x(self, x, k):
        if self._derivs is None:
            raise NotImplementedError("no derivative supplied")
        x = np.asarray(x, dtype=float)
        s = self.side * (x - self.edge)
        return np.where(s > 0, self._derivs(x, k), 0.0)
