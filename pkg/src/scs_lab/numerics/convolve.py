"""Numerical convolution of one-sided kernels with integrable edge
singularities, and derivatives of such convolutions."""
from dataclasses import dataclass, field
from functools import lru_cache
import csv
import io
import math

import numpy as np

from .density import Kernel


class QuadratureFailure(ArithmeticError):
    pass


class UnsupportedOrder(ValueError):
    pass


@lru_cache(maxsize=None)
def _gl(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gl_nodes(a, b, n):
    x, w = _gl(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def panel_breaks(scale, upper, ratio=2.0):
    """Geometric panel edges 0, scale, scale*ratio, ... up to ``upper``."""
    scale = max(scale, 1e-14)
    edges = [0.0]
    e = scale
    while e < upper:
        edges.append(e)
        e *= ratio
    edges.append(upper)
    return edges


def panel_quad(func, edges, n=24):
    """Composite Gauss-Legendre over consecutive panels."""
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        x, w = gl_nodes(a, b, n)
        total += float(np.dot(w, func(x)))
    return total


class Convolution(Kernel):
    """f * g, evaluated exactly (to quadrature accuracy) at any point.

    Same-side pairs give a one-sided kernel with edge a_f + a_g and exponent
    e_f + e_g + 1.  A right-sided and a left-sided kernel give a two-sided
    function (side 0) with a possibly singular point at a_f + a_g.
    """

    def __init__(self, f, g, n_nodes=96, rtol=1e-11, check=True):
        self.f, self.g = f, g
        self.n_nodes = n_nodes
        self.rtol = rtol
        self.check = check
        self.edge = f.edge + g.edge
        if f.side == g.side:
            self.side = f.side
            self.exponent = f.exponent + g.exponent + 1
        else:
            self.side = 0
            self.exponent = None
        amp = f.tail[0] * g.tail[0]
        rate = 0.9 * min(f.tail[1], g.tail[1])
        self.tail = (amp, rate)
        self._fit_tail()

    def _fit_tail(self):
        amp, rate = self.tail
        s = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
        dirs = [1, -1] if self.side == 0 else [self.side]
        best = 0.0
        for sd in dirs:
            vals = np.abs(self(self.edge + sd * s))
            nz = vals > 0
            if nz.any():
                best = max(best, float(np.max(np.exp(np.log(vals[nz]) + rate * s[nz]))))
        self.tail = (2.0 * best if best > 0 else amp, rate)

    # same-side kernels ---------------------------------------------------
    def _theta_integral(self, L, n):
        f, g = self.f, self.g
        x, w = gl_nodes(0.0, math.pi / 2, n)
        sn, cs = np.sin(x), np.cos(x)
        L = np.atleast_1d(np.asarray(L, dtype=float))
        u = L[:, None] * sn[None, :] ** 2
        wv = L[:, None] * cs[None, :] ** 2
        pf = sn ** (2 * f.exponent + 1)
        pg = cs ** (2 * g.exponent + 1)
        vals = f.reg(u.ravel()).reshape(u.shape) * g.reg(wv.ravel()).reshape(u.shape)
        return 2.0 * (vals * (pf * pg)[None, :]) @ w

    def reg(self, s):
        if self.side == 0:
            raise NotImplementedError("two-sided convolution has no edge expansion")
        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s)
        out = self._theta_integral(flat, self.n_nodes)
        if self.check:
            ref = self._theta_integral(flat, 2 * self.n_nodes)
            err = np.abs(out - ref)
            bad = err > self.rtol * np.maximum(np.abs(ref), 1e-300) + 1e-300
            if np.any(bad):
                raise QuadratureFailure(
                    f"theta quadrature did not settle (max error {err.max():.3e})")
            out = ref
        return out.reshape(s.shape) if s.ndim else float(out[0])

    # mixed kernels -------------------------------------------------------
    def _mixed_point(self, x):
        """Right-sided f against left-sided g at one point."""
        f, g = (self.f, self.g) if self.f.side > 0 else (self.g, self.f)
        delta = x - f.edge - g.edge
        if delta == 0 and f.exponent + g.exponent <= -1:
            return math.inf
        reach = 45.0 / min(f.tail[1], g.tail[1])
        if delta >= 0:
            # u = delta + r**2, g is singular at r = 0
            def integrand(r):
                r2 = r * r
                fv = (delta + r2) ** f.exponent * f.reg(delta + r2) if f.exponent else f.reg(delta + r2)
                return 2.0 * r ** (1 + 2 * g.exponent) * g.reg(r2) * fv
        else:
            ad = -delta

            def integrand(r):
                r2 = r * r
                gv = (ad + r2) ** g.exponent * g.reg(ad + r2) if g.exponent else g.reg(ad + r2)
                return 2.0 * r ** (1 + 2 * f.exponent) * f.reg(r2) * gv
        edges = panel_breaks(0.25 * math.sqrt(abs(delta)), math.sqrt(reach))
        a = panel_quad(integrand, edges, 24)
        if self.check:
            b = panel_quad(integrand, edges, 40)
            if abs(a - b) > self.rtol * 10 * max(abs(b), 1e-300) + 1e-300:
                raise QuadratureFailure(f"mixed quadrature did not settle at x={x}")
            a = b
        return a

    def __call__(self, x):
        if self.side != 0:
            return Kernel.__call__(self, x)
        x = np.asarray(x, dtype=float)
        out = np.array([self._mixed_point(float(xi)) for xi in np.atleast_1d(x)])
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def deriv_x(self, x, k):
        x = np.asarray(x, dtype=float)
        out = np.array([conv_derivative(self.f, self.g, k, float(xi))
                        for xi in np.atleast_1d(x)])
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def __repr__(self):
        return f"Convolution({self.f!r}, {self.g!r})"


@dataclass
class GridFunction:
    """Samples of a function with its singularity and tail metadata.

    ``source`` keeps the exact evaluator when there is one, so consumers
    can re-evaluate off the grid.
    """
    nodes: np.ndarray
    values: np.ndarray
    edge: float = 0.0
    exponent: object = None
    side: int = 1
    tail: tuple = (1.0, 1.0)
    source: object = field(default=None, repr=False)
    dsource: object = field(default=None, repr=False)

    def __call__(self, x):
        if self.source is not None:
            return self.source(x)
        return np.interp(x, self.nodes, self.values)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for a, b in zip(self.nodes, self.values):
            w.writerow([repr(float(a)), repr(float(b))])
        return buf.getvalue()


def convolve(f, g, **kw):
    return Convolution(f, g, **kw)


def num_convolve(f, g, nodes, **kw):
    """Sample f * g at ``nodes``; the GridFunction keeps the evaluator."""
    c = Convolution(f, g, **kw)
    nodes = np.asarray(nodes, dtype=float)
    return GridFunction(nodes, np.asarray(c(nodes)), edge=c.edge,
                        exponent=c.exponent, side=c.side, tail=c.tail,
                        source=c, dsource=lambda x: c.deriv_x(x, 1))


def edge_coefficients(f, g, count=4, width=0.8, degree=12, n_nodes=60):
    """Leading coefficients C_n of f * g = s**e * sum C_n s**n next to the
    edge, read off a Chebyshev fit of num_convolve samples on (0, width)."""
    k = np.arange(n_nodes)
    s = 0.5 * width * (1 - np.cos(np.pi * (k + 0.5) / n_nodes))
    c = Convolution(f, g)
    if c.side == 0:
        raise UnsupportedOrder("edge expansion needs a one-sided convolution")
    grid = num_convolve(f, g, c.edge + c.side * s)
    reg = grid.values / s ** c.exponent if c.exponent else grid.values
    cheb = np.polynomial.chebyshev.Chebyshev.fit(s, reg, degree, domain=[0.0, width])
    out = [float(cheb(0.0))]
    for n in range(1, count):
        cheb = cheb.deriv()
        out.append(float(cheb(0.0)) / math.factorial(n))
    return out


def _half_split(f, g, k, s, n=64):
    """k-th s-derivative of the same-side convolution at distance s, using
    the split at z0 = s/2 so both integrals avoid the far singularity."""
    z0 = 0.5 * s

    def piece(p, q):
        # int_0^{s/2} p(u) q^(k)(s-u) du, p singular like u**e at 0
        r, w = gl_nodes(0.0, 1.0, n)
        u = z0 * r * r
        e = p.exponent
        pv = p.reg(u) * (z0 ** e * r ** (2 * e + 1)) if e else p.reg(u) * r
        return float(np.dot(w, 2 * z0 * pv * q.deriv_s(s - u, k)))

    total = piece(f, g) + piece(g, f)
    for l in range(k):
        total += float(f.deriv_s(z0, l) if l else f(f.edge + f.side * z0)) * \
            float(g.deriv_s(s - z0, k - 1 - l) if k - 1 - l else g(g.edge + g.side * (s - z0)))
    return total


def conv_derivative(f, g, k, x):
    """d^k/dx^k (f * g)(x) for k <= 4.

    Same-side kernels use the split-point boundary formula.  For a
    right-sided f and a left-sided g that is smooth up to its edge,
      x > edge: int_x^inf f(y) g^(k)(x-y) dy - sum_l f^(k-l-1)(x) g^(l)(0)
      x < edge: int_0^inf f(y) g^(k)(x-y) dy
    in coordinates where both edges sit at 0.
    """
    if not isinstance(k, int) or k < 0 or k > 4:
        raise UnsupportedOrder(f"derivative order {k} not in 0..4")
    if k == 0:
        return float(Convolution(f, g)(x))
    if f.side == g.side:
        s = f.side * (x - f.edge - g.edge)
        if s <= 0:
            return 0.0
        return f.side ** k * _half_split(f, g, k, s)
    if f.side < 0:
        f, g = g, f
    if g.exponent != 0:
        if f.exponent == 0:
            raise UnsupportedOrder("mixed derivative needs the left kernel smooth at its edge")
        raise UnsupportedOrder("mixed derivative needs one kernel smooth at its edge")
    # shift so both edges are at 0: y = f.edge + u, x - y = g.edge + xs - u
    xs = x - f.edge - g.edge
    reach = 45.0 / min(f.tail[1], g.tail[1])
    lower = max(xs, 0.0)

    def integrand(r):
        u = lower + r * r
        if lower == 0 and f.exponent:
            fv = r ** (1 + 2 * f.exponent) * f.reg(u)
        else:
            fv = r * f(f.edge + u)
        return 2 * fv * g.deriv_x(g.edge + xs - u, k)

    edges = panel_breaks(0.25 * math.sqrt(abs(xs)) if xs else 1e-3, math.sqrt(reach))
    total = panel_quad(integrand, edges, 32)
    if xs > 0:
        for l in range(k):
            fk = k - l - 1
            fval = f.deriv_x(f.edge + xs, fk) if fk else f(f.edge + xs)
            total -= float(fval) * float(_edge_derivative(g, l))
    return total


def _edge_derivative(g, l):
    """One-sided l-th derivative of g at its edge (g smooth up to it)."""
    x = g.edge + g.side * 1e-13 * (1.0 + abs(g.edge))
    return g.deriv_x(x, l) if l else g(x)
