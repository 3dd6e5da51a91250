"""Wrapping onto the circle and recovery of the leading singular
coefficients from the wrapped function."""
from dataclasses import dataclass
import math

import numpy as np

from .convolve import GridFunction


class TailBoundTooLoose(ArithmeticError):
    pass


class ExtrapolationDivergence(ArithmeticError):
    pass


def tail_terms(kernel, tol=1e-15, k_max=10000):
    """Smallest K so that the terms |k| > K of sum_k f(x+k), x in (-1/2, 1/2),
    are bounded by ``tol``; returns (K, bound)."""
    amp, rate = kernel.tail
    edge = kernel.edge
    geo = 1.0 / (-math.expm1(-rate))
    for K in range(1, k_max + 1):
        # nearest neglected point is at distance >= K + 1/2 - |edge| from the edge
        dist = K + 0.5 - abs(edge)
        if dist < 1:
            continue
        bound = amp * math.exp(-rate * dist) * geo
        if kernel.side == 0:
            bound *= 2
        if bound <= tol:
            return K, bound
    raise TailBoundTooLoose(f"tail bound above {tol} even with K={k_max}")


def _shifts(kernel, K):
    if kernel.side > 0:
        lo = math.floor(kernel.edge - 0.5) - 1
        return range(max(lo, -K), K + 1)
    if kernel.side < 0:
        hi = math.ceil(kernel.edge + 0.5) + 1
        return range(-K, min(hi, K) + 1)
    return range(-K, K + 1)


class Wrapped:
    """W(x) = sum_k f(x + k), evaluated on demand."""

    def __init__(self, kernel, tol=1e-15, K=None):
        self.kernel = kernel
        if K is None:
            K, bound = tail_terms(kernel, tol)
        else:
            amp, rate = kernel.tail
            bound = amp * math.exp(-rate * (K + 0.5 - abs(kernel.edge))) / (-math.expm1(-rate))
            if bound > tol:
                raise TailBoundTooLoose(f"K={K} leaves a tail bound of {bound:.3e} > {tol}")
        self.K = K
        self.tail_bound = bound
        self.shifts = np.array(list(_shifts(kernel, K)), dtype=float)

    def _sum(self, fn, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x)
        pts = flat[:, None] + self.shifts[None, :]
        vals = np.asarray(fn(pts.ravel())).reshape(pts.shape)
        out = vals.sum(axis=1)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def __call__(self, x):
        return self._sum(self.kernel, x)

    def derivative(self, x, k=1):
        return self._sum(lambda y: self.kernel.deriv_x(y, k), x)


def recovery_nodes(x0=1e-3, levels=6, center=0.0):
    """Points center +- x0 2**-j, j < levels, where recovery samples W."""
    xs = x0 * 2.0 ** -np.arange(levels)
    return np.sort(np.concatenate([center - xs, center + xs]))


def wrap_mod1(kernel, nodes=None, tol=1e-15, K=None):
    """Wrap a kernel onto (-1/2, 1/2).  Default nodes are a uniform grid plus
    the recovery points around 0."""
    W = Wrapped(kernel, tol, K)
    if nodes is None:
        nodes = np.union1d(np.linspace(-0.5, 0.5, 201)[1:-1], recovery_nodes())
    nodes = np.asarray(nodes, dtype=float)
    return GridFunction(nodes, np.asarray(W(nodes)), edge=0.0, exponent=None,
                        side=0, tail=(W.tail_bound, 0.0), source=W,
                        dsource=W.derivative)


def richardson(values, exponents, ratio=2.0):
    """Generalised Richardson table for E(x_j) with x_{j+1} = x_j / ratio and
    E(x) = L + sum c_i x**exponents[i].  Returns (limit, error estimate)."""
    T = [float(v) for v in values]
    prev = T[:]
    est = T[-1]
    last = []
    for gamma in exponents[:len(values) - 1]:
        f = ratio ** gamma
        T = [(f * T[j + 1] - T[j]) / (f - 1) for j in range(len(T) - 1)]
        last.append(T[-1])
        prev = T
    est = prev[-1]
    err = abs(last[-1] - last[-2]) if len(last) > 1 else abs(values[-1] - est)
    return est, err


def _ladder(a, count):
    """Exponents of the correction terms: integers from the singular series
    and k - a (k odd) from the smooth part of the wrapped function."""
    a = float(a)
    vals = set()
    for n in range(1, count + 2):
        vals.add(float(n))
    for k in range(1, 2 * count + 2, 2):
        if k - a > 0:
            vals.add(round(k - a, 12))
    return sorted(vals)[:count]


@dataclass
class Recovery:
    A0: float
    A1: float
    err0: float
    err1: float
    levels: int
    x0: float

    def to_json(self):
        return {"A0": self.A0, "A1": self.A1, "err_A0": self.err0,
                "err_A1": self.err1, "levels": self.levels, "x0": self.x0}


def recover_A0_A1(W, a, center=0.0, x0=1e-3, levels=6, with_A1=True, tol=None):
    """Leading coefficients of F(x) = x**a sum A_n x**n at the singular point
    of W = wrapped F.

    A0 = lim x**-a (W(x) - W(-x)); for A1 the derivative is used,
    A1 = Gamma(1+a)/Gamma(2+a) * lim [x**-a (W'(x) - W'(-x)) - a A0 / x].
    """
    src = W.source if isinstance(W, GridFunction) else W
    dsrc = W.dsource if isinstance(W, GridFunction) else getattr(W, "derivative", None)
    a = float(a)
    xs = x0 * 2.0 ** -np.arange(levels)
    plus = np.asarray(src(center + xs))
    minus = np.asarray(src(center - xs))
    E0 = xs ** (-a) * (plus - minus)
    ladder = _ladder(a, levels - 1)
    A0, err0 = richardson(E0, ladder)
    A1 = err1 = math.nan
    if with_A1:
        if dsrc is None:
            raise ExtrapolationDivergence("no derivative available for A1")
        dp = np.asarray(dsrc(center + xs))
        dm = np.asarray(dsrc(center - xs))
        E1 = xs ** (-a) * (dp - dm) - a * A0 / xs
        Abar, err1 = richardson(E1, _ladder(a, levels - 1))
        A1 = Abar / (1 + a)
        err1 = err1 / (1 + a)
    if tol is not None and (err0 > tol * max(abs(A0), 1e-300)):
        raise ExtrapolationDivergence(f"Richardson levels disagree ({err0:.3e})")
    return Recovery(float(A0), float(A1), float(err0), float(err1), levels, x0)
