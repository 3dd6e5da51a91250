from fractions import Fraction
import math

import numpy as np
import pytest
import sympy
from scipy import integrate

from scs_lab.series import conv_series_rescaled, v_coefficients
from scs_lab.numerics import (LN2, Density, SmoothKernel, Convolution, GridFunction, eval_density,
                              hbar, h, hbar_derivative, hbar_derivative_weights, num_convolve,
                              conv_derivative, edge_coefficients, probe_W, hbar_power_probe,
                              wrap_mod1, Wrapped, recover_A0_A1, richardson, tail_terms,
                              BoundViolation, TailBoundTooLoose, UnsupportedOrder)


# densities ---------------------------------------------------------------

def test_h_at_zero():
    assert eval_density("h", 0.0) == pytest.approx((2 / math.pi) / math.sqrt(3), rel=1e-15)


def test_h_vanishes_left_of_support():
    assert eval_density("h", -1.0) == 0.0
    assert eval_density("h", -LN2 - 1e-12) == 0.0
    assert eval_density("hbar", 0.0) == math.inf


def test_h_integrates_to_one():
    # u = sqrt(x + ln 2) removes the edge singularity
    val, _ = integrate.quad(lambda u: 2 * u * h(u * u - LN2), 0, 12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_h_is_shifted_hbar():
    x = np.linspace(0.01, 5, 50)
    assert np.allclose(h(x - LN2), (2 / math.pi) * hbar(x), rtol=1e-14, atol=0)


@pytest.mark.parametrize("t", [1.0, 2.5, -0.7])
def test_rescaled_h_mass(t):
    d = Density("h", t)
    s = lambda u: d.edge + d.side * u * u
    val, _ = integrate.quad(lambda u: 2 * u * d(s(u)), 0, math.sqrt(40 * abs(t)), limit=200)
    assert val == pytest.approx(1.0, abs=1e-9)


# hbar derivatives -----------------------------------------------------------

def test_hbar_derivative_weights_against_sympy():
    x = sympy.Symbol("x", positive=True)
    f = 1 / sympy.sqrt(sympy.exp(2 * x) - 1)
    for n in range(5):
        w = hbar_derivative_weights(n)
        rebuilt = sum(c * sympy.exp(2 * k * x) for k, c in w.items()) / (sympy.exp(2 * x) - 1) ** (n + sympy.Rational(1, 2))
        assert sympy.simplify(sympy.diff(f, x, n) - rebuilt) == 0


def test_hbar_derivative_low_orders():
    x = np.array([0.1, 1.0, 3.0])
    assert np.allclose(hbar_derivative(0, x), hbar(x), rtol=1e-15)
    assert np.allclose(hbar_derivative(1, x), -np.exp(2 * x) / (np.exp(2 * x) - 1) ** 1.5, rtol=1e-13)


def test_hbar_third_derivative_finite_difference():
    x, e = 1.0, 1e-2
    fd = (hbar(x + 2 * e) - 2 * hbar(x + e) + 2 * hbar(x - e) - hbar(x - 2 * e)) / (2 * e ** 3)
    assert hbar_derivative(3, x) == pytest.approx(fd, rel=1e-3)
    # fourth-order stencil for the stated tolerance
    e = 2e-2
    fd4 = (-hbar(x + 3 * e) + 8 * hbar(x + 2 * e) - 13 * hbar(x + e)
           + 13 * hbar(x - e) - 8 * hbar(x - 2 * e) + hbar(x - 3 * e)) / (8 * e ** 3)
    assert hbar_derivative(3, x) == pytest.approx(fd4, rel=1e-5)


# convolution -------------------------------------------------------------

def test_indicator_triangle():
    box = SmoothKernel(lambda s: (s < 1).astype(float), exponent=0.0, tail=(1.0, 50.0))
    tri = Convolution(box, box, n_nodes=400, check=False)
    assert tri(1.0) == pytest.approx(1.0, abs=1e-12)
    assert tri(0.5) == pytest.approx(0.5, abs=1e-2)
    assert tri(1.5) == pytest.approx(0.5, abs=1e-2)
    assert tri(2.5) == 0.0


def test_hbar_hbar_matches_series():
    cc = conv_series_rescaled(v_coefficients(16), Fraction(-1, 2), [1, 1])
    xs = np.linspace(0.001, 0.1, 15)
    g = num_convolve(Density("hbar", 1), Density("hbar", 1), xs)
    want = np.array([cc.evaluate(x) for x in xs])
    assert np.allclose(g.values, want, rtol=1e-8, atol=0)
    assert isinstance(g, GridFunction)


def test_hbar_hbar_against_quad():
    x = 0.7
    f = lambda y: hbar(y) * hbar(x - y)
    ref = integrate.quad(f, 0, x, points=[x / 2], limit=200)[0]
    assert Convolution(Density("hbar", 1), Density("hbar", 1))(x) == pytest.approx(ref, rel=1e-8)


def test_edge_coefficients_rescaled():
    cc = conv_series_rescaled(v_coefficients(12), Fraction(-1, 2), [1, 2])
    want = [cc.prefactor * float(c) for c in cc.coeffs[:4]]
    got = edge_coefficients(Density("hbar", 1), Density("hbar", 2))
    assert np.allclose(got, want, rtol=1e-6, atol=0)


def test_mixed_branch_monte_carlo():
    f, g = Density("h", 1), Density("h", -1)
    conv = Convolution(f, g)
    x = -0.3
    rng = np.random.default_rng(7)
    # Y = ln(1/(2 sin(pi U))) has density h_1; average h_{-1}(x - Y)
    y = -np.log(2 * np.sin(np.pi * rng.random(400_000)))
    est = float(np.mean(g(x - y)))
    assert conv(x) == pytest.approx(est, rel=1e-2)
    ref = integrate.quad(lambda t: f(t) * g(x - t), max(f.edge, x - g.edge), 40, limit=400)[0]
    assert conv(x) == pytest.approx(ref, rel=1e-3)


PAIRS = [(("hbar", 1), ("hbar", 1)), (("h", 1), ("h", 2)), (("h", 1), ("h", -1)),
         (("h", -0.5), ("h", -2))]


@pytest.mark.parametrize("a,b", PAIRS)
def test_mass_conservation(a, b):
    f, g = Density(*a), Density(*b)
    c = Convolution(f, g)
    if c.side != 0:
        u_max = math.sqrt(60 * max(abs(f.t), abs(g.t)))
        val = integrate.quad(lambda u: 2 * u * c(c.edge + c.side * u * u), 0, u_max, limit=200)[0]
    else:
        val = (integrate.quad(c, c.edge, c.edge + 40, limit=200)[0]
               + integrate.quad(c, c.edge - 40, c.edge, limit=200)[0])
    assert val == pytest.approx(f.mass() * g.mass(), rel=1e-7)


def test_support_additivity():
    t1, t2 = 1.0, 2.0
    c = Convolution(Density("h", t1), Density("h", t2))
    assert c.edge == pytest.approx(-(t1 + t2) * LN2, abs=1e-15)
    assert c(c.edge - 1e-9) == 0.0
    assert c(c.edge + 1e-6) > 0


def test_reflection_identity():
    pos = Convolution(Density("h", 1), Density("h", 2))
    neg = Convolution(Density("h", -1), Density("h", -2))
    xs = np.linspace(pos.edge + 0.01, 4, 20)
    assert np.allclose(pos(xs), neg(-xs), rtol=1e-10, atol=0)


def test_shift_identity():
    # hbar_t is h_t moved by t ln 2 (up to the 2/pi weight)
    t1, t2 = 1.0, 1.5
    hb = Convolution(Density("hbar", t1), Density("hbar", t2))
    hh = Convolution(Density("h", t1), Density("h", t2))
    xs = np.linspace(0.05, 3, 20)
    shift = -(t1 + t2) * LN2
    assert np.allclose(hh(xs + shift), (2 / math.pi) ** 2 * hb(xs), rtol=1e-8, atol=0)


# derivatives ---------------------------------------------------------------

def _bump():
    """exp(-1/(s(1-s))) on (0, 1): smooth and compactly supported."""
    s = sympy.Symbol("s")
    fns = [sympy.lambdify(s, sympy.diff(sympy.exp(-1 / (s * (1 - s))), s, k), "numpy")
           for k in range(4)]

    def piece(k):
        def fn(u):
            u = np.asarray(u, dtype=float)
            inside = (u > 0) & (u < 1)
            out = np.zeros_like(u)
            with np.errstate(all="ignore"):
                out[inside] = fns[k](u[inside])
            return out
        return fn

    return SmoothKernel(piece(0), exponent=0.0, derivs=lambda x, k: piece(k)(x),
                        tail=(1e-300, 50.0))


def _fd(fn, x, k, e):
    if k == 1:
        return (fn(x + e) - fn(x - e)) / (2 * e)
    if k == 2:
        return (fn(x + e) - 2 * fn(x) + fn(x - e)) / e ** 2
    if k == 3:
        return (fn(x + 2 * e) - 2 * fn(x + e) + 2 * fn(x - e) - fn(x - 2 * e)) / (2 * e ** 3)


@pytest.mark.parametrize("x", [0.7, 1.3])
def test_conv_derivative_smooth_pair(x):
    f = _bump()
    c = Convolution(f, f, n_nodes=200, check=False)
    assert conv_derivative(f, f, 1, x) == pytest.approx(_fd(c, x, 1, 1e-4), rel=1e-6)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("x", [0.4, 1.5])
def test_conv_derivative_densities(k, x):
    f, g = Density("hbar", 1), Density("hbar", 2)
    c = Convolution(f, g)
    e = {1: 1e-4, 2: 1e-3, 3: 5e-3}[k]
    assert conv_derivative(f, g, k, x) == pytest.approx(_fd(c, x, k, e), rel=1e-4)


@pytest.mark.parametrize("x", [-0.6, 0.5])
def test_conv_derivative_mixed_branches(x):
    f = Density("hbar", 1)
    g = SmoothKernel(lambda s: np.exp(-s), side=-1, exponent=0.0,
                     derivs=lambda y, k: np.exp(y), tail=(1.0, 1.0))
    c = Convolution(f, g)
    assert conv_derivative(f, g, 1, x) == pytest.approx(_fd(c, x, 1, 1e-4), rel=1e-6)


def test_conv_derivative_order_limit():
    with pytest.raises(UnsupportedOrder):
        conv_derivative(Density(), Density(), 5, 1.0)


# decay probes --------------------------------------------------------------

def test_probe_n0():
    rep = hbar_power_probe(0)
    assert rep.r == -0.5
    assert rep.diagnostics["small_x_limit"] == pytest.approx(2 ** -0.5, abs=1e-6)


def test_probe_n3():
    rep = hbar_power_probe(3)
    assert rep.diagnostics["small_x_limit"] == pytest.approx(2 ** -3.5, abs=1e-6)
    assert rep.diagnostics["large_x_majorant_times_exp_half"] < 1e-6


def test_probe_rejects_slow_decay():
    with pytest.raises(BoundViolation):
        probe_W(lambda s: 1 / s)


def test_richardson_removes_powers():
    xs = 0.1 * 2.0 ** -np.arange(5)
    vals = 3 + 2 * xs + 5 * xs ** 2 - xs ** 3
    lim, err = richardson(vals, [1, 2, 3, 4])
    assert lim == pytest.approx(3, abs=1e-12)


# wrapping -------------------------------------------------------------------

def test_wrap_of_short_kernel():
    f = SmoothKernel(lambda s: np.where(s < 0.5, 1 + s, 0.0), exponent=0.0, tail=(1e-300, 100.0))
    W = wrap_mod1(f, nodes=np.linspace(-0.45, 0.45, 19), tol=1e-12)
    xs = W.nodes
    assert np.allclose(W.values[xs > 0], 1 + xs[xs > 0])
    assert np.all(W.values[xs < 0] == 0)


def test_wrapped_mass_of_h():
    W = Wrapped(Density("h", 1), tol=1e-12)
    e = W.kernel.edge
    # one full period starting at the singular point
    val = integrate.quad(lambda u: 2 * u * W(e + u * u), 0, 1, limit=200)[0]
    assert val == pytest.approx(1.0, abs=1e-8)


def test_tail_cutoff_bound():
    K, bound = tail_terms(Density("h", 1), tol=1e-10)
    assert bound <= 1e-10
    with pytest.raises(TailBoundTooLoose):
        Wrapped(Density("h", 1), tol=1e-10, K=2)


def test_recover_d1():
    W = wrap_mod1(Density("h", 1))
    rec = recover_A0_A1(W, -0.5, center=(-LN2 + 0.5) % 1 - 0.5)
    a0 = (2 / math.pi) * math.sqrt(2) / 2
    a1 = -(2 / math.pi) * math.sqrt(2) / 4
    assert rec.A0 == pytest.approx(a0, rel=1e-4)
    assert rec.A1 == pytest.approx(a1, rel=1e-4)


def test_recover_d2():
    c = Convolution(Density("h", 1), Density("h", 1))
    W = Wrapped(c)
    rec = recover_A0_A1(W, 0.0, center=(c.edge + 0.5) % 1 - 0.5, with_A1=False)
    cc = conv_series_rescaled(v_coefficients(4), Fraction(-1, 2), [1, 1])
    assert rec.A0 == pytest.approx((2 / math.pi) ** 2 * float(cc.coeffs[0]), rel=1e-4)


def test_recover_mixed_sign_pair():
    from scs_lab.series import mixed_sign_combine, sign_resolve
    v = v_coefficients(6)
    pair = mixed_sign_combine(conv_series_rescaled(v, Fraction(-1, 2), [1, 1]),
                              conv_series_rescaled(v, Fraction(-1, 2), [-1]))
    c = Convolution(Convolution(Density("h", 1), Density("h", 1)), Density("h", -1))
    rec = recover_A0_A1(Wrapped(c), 0.5, center=(c.edge + 0.5) % 1 - 0.5, with_A1=False)
    cands = [(2 / math.pi) ** 3 * p.prefactor * float(p.side_coeffs()[0]) for p in pair]
    assert cands[0] == pytest.approx(-cands[1])
    assert min(abs(rec.A0 - x) / abs(x) for x in cands) < 1e-4
    # the sign is fixed by a0 > 0
    B = sign_resolve(pair, v[0], 3)
    assert float(B[0]) > 0
