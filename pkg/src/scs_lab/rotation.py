"""Continued fractions, Birkhoff sums of f(x) = -ln x - ln(1-x) - 2 over
the rotation x -> x + alpha mod 1, and their limit distributions."""
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
import math
import os

import mpmath
import numpy as np
from scipy import special, stats

DEFAULT_DPS = 200
MAX_DPS = 20000
EPS_GUARD = 1e-12


class PrecisionExhausted(ArithmeticError):
    pass


class AllPointsSkipped(ArithmeticError):
    pass


def working_dps():
    try:
        return int(os.environ.get("SCS_LAB_PRECISION", DEFAULT_DPS))
    except ValueError:
        return DEFAULT_DPS


@contextmanager
def iv_dps(dps):
    """Temporarily set the working precision of mpmath's interval context."""
    old = mpmath.iv.dps
    mpmath.iv.dps = dps
    try:
        yield mpmath.iv
    finally:
        mpmath.iv.dps = old


# continued fractions -------------------------------------------------------

def convergents(quotients):
    """p_n, q_n for alpha = 1/(a_1 + 1/(a_2 + ...)), with p_0 = 0, q_0 = 1."""
    p, q = [0, 1], [1, quotients[0]] if quotients else [1]
    if not quotients:
        return [0], [1]
    for a in quotients[1:]:
        p.append(a * p[-1] + p[-2])
        q.append(a * q[-1] + q[-2])
    return p, q


@dataclass
class ContinuedFraction:
    quotients: list
    p: list
    q: list
    alpha: object            # mpmath interval containing alpha
    dps: int
    exhausted: bool = False
    name: str = ""

    @property
    def depth(self):
        return len(self.quotients)

    def alpha_float(self):
        return float(self.alpha.mid)

    def alpha_mid(self):
        with mpmath.workdps(self.dps):
            return mpmath.mpf(self.alpha.mid)

    def delta(self, n):
        """alpha - p_n/q_n as an interval."""
        with iv_dps(self.dps):
            return self.alpha - mpmath.iv.mpf(self.p[n]) / self.q[n]

    def norm_q_alpha(self, n):
        """||q_n alpha|| as an interval."""
        with iv_dps(self.dps):
            return abs(self.q[n] * self.alpha - self.p[n])

    def convergent_bound_ok(self, n):
        """Certified |alpha - p_n/q_n| < 1/(q_n q_{n+1})."""
        if n + 1 >= len(self.q):
            raise IndexError("need q_{n+1}")
        with iv_dps(self.dps):
            lhs = abs(self.delta(n))
            rhs = mpmath.iv.mpf(1) / (mpmath.iv.mpf(self.q[n]) * self.q[n + 1])
            return bool(lhs.b < rhs.a)

    def dc_sequence(self, power=3):
        """(q_n**power / q_{n+1} exactly, upper end of q_n**power ||q_n alpha||)
        for every n with q_{n+1} known; ||q_n alpha|| < 1/q_{n+1} makes the
        first an upper bound for the second."""
        out = []
        for n in range(1, len(self.q) - 1):
            ratio = Fraction(self.q[n] ** power, self.q[n + 1])
            with iv_dps(self.dps):
                val = self.norm_q_alpha(n) * mpmath.iv.mpf(self.q[n]) ** power
            out.append((ratio, float(val.b)))
        return out

    def to_json(self, digits=20):
        out = {"name": self.name, "depth": self.depth, "exhausted": self.exhausted,
               "dps": self.dps, "quotients": [str(a) for a in self.quotients],
               "p": [str(x) for x in self.p], "q": [str(x) for x in self.q],
               "norm_q_alpha": []}
        with iv_dps(self.dps):
            for n in range(len(self.q)):
                iv = self.norm_q_alpha(n)
                out["norm_q_alpha"].append([mpmath.nstr(iv.a, digits), mpmath.nstr(iv.b, digits)])
        return out


def _interval(alpha, dps):
    iv = mpmath.iv
    with iv_dps(dps):
        if isinstance(alpha, type(iv.mpf(0))):
            return alpha
        if isinstance(alpha, tuple):
            return iv.mpf([str(alpha[0]), str(alpha[1])])
        return iv.mpf(str(alpha) if not isinstance(alpha, mpmath.mpf) else alpha)


def cf_expand(alpha, depth, dps=None, strict=False, name=""):
    """Expand alpha in (0, 1) to at most ``depth`` partial quotients.

    alpha is carried as an interval; when its image straddles an integer
    the expansion stops with exhausted=True (or PrecisionExhausted when
    strict).
    """
    dps = dps or working_dps()
    with iv_dps(dps):
        x = _interval(alpha, dps)
        if not (x.a > 0 and x.b < 1):
            raise ValueError("alpha must lie in (0, 1)")
        quotients = []
        exhausted = False
        for _ in range(depth):
            if x.a <= 0:
                exhausted = True
                break
            y = 1 / x
            lo, hi = int(mpmath.floor(y.a)), int(mpmath.floor(y.b))
            if lo != hi:
                exhausted = True
                break
            quotients.append(lo)
            x = y - lo
        if exhausted and strict:
            raise PrecisionExhausted(
                f"only {len(quotients)} quotients certified at {dps} digits")
        p, q = convergents(quotients)
        alpha_iv = _interval(alpha, dps)
    return ContinuedFraction(quotients, p, q, alpha_iv, dps, exhausted, name)


def cf_build(quotients, dps=None, name=""):
    """alpha = [0; a_1, ..., a_m, 1, 1, 1, ...]: the given quotients followed
    by the golden tail, so alpha is a definite irrational and expanding it
    gives the quotients back."""
    quotients = [int(a) for a in quotients]
    if not quotients or min(quotients) < 1:
        raise ValueError("partial quotients must be positive integers")
    p, q = convergents(quotients)
    # ||q_m alpha|| is about 1/q_m, so certify with room for q_m**2
    need = 2 * int(q[-1].bit_length() * math.log10(2) + 1) + 30
    dps = max(dps or working_dps(), need)
    if dps > MAX_DPS:
        raise PrecisionExhausted(
            f"{len(quotients)} quotients need more than {MAX_DPS} digits; use a smaller depth")
    iv = mpmath.iv
    with iv_dps(dps):
        phi = (1 + iv.sqrt(5)) / 2
        alpha = (phi * p[-1] + p[-2]) / (phi * q[-1] + q[-2])
    return ContinuedFraction(quotients, p, q, alpha, dps, False, name)


def cf_build_liouville(growth=3, depth=5, a1=2, dps=None):
    """Liouville-type alpha with a_{n+1} = q_n**growth."""
    quotients = [a1]
    p, q = convergents(quotients)
    while len(quotients) < depth:
        quotients.append(q[-1] ** growth)
        p, q = convergents(quotients)
    return cf_build(quotients, dps, name=f"liouville:{growth}")


def golden_alpha(depth=40, dps=None):
    dps = dps or working_dps()
    with iv_dps(dps):
        alpha = (mpmath.iv.sqrt(5) - 1) / 2
    return cf_expand(alpha, depth, dps, name="golden")


def parse_alpha(text, depth=None, dps=None):
    """'golden', 'liouville:K', 'cf:a1,a2,...' or a decimal string."""
    if text == "golden":
        return golden_alpha(depth or 40, dps)
    if text.startswith("liouville"):
        growth = int(text.split(":")[1]) if ":" in text else 3
        return cf_build_liouville(growth, depth or 5, dps=dps)
    if text.startswith("cf:"):
        return cf_build([int(a) for a in text[3:].split(",")], dps, name=text)
    return cf_expand(text, depth or 30, dps, name=text)


# the observable and its Birkhoff sums ----------------------------------

def f_obs(x):
    """-ln x - ln(1 - x) - 2 on (0, 1); mean zero."""
    x = np.asarray(x, dtype=float)
    return -np.log(x) - np.log1p(-x) - 2.0


def _orbit_sum(x, n, alpha, eps_guard):
    """f^(n)(x) by direct summation and the mask of points whose orbit came
    within eps_guard of 0 or 1.  For n < 0, f^(n)(x) = -sum_{j=n}^{-1} f(x + j alpha)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    alpha = float(alpha)
    sign, js = (1.0, range(n)) if n >= 0 else (-1.0, range(n, 0))
    total = np.zeros_like(x)
    bad = np.zeros(x.shape, dtype=bool)
    for j in js:
        y = np.mod(x + math.fmod(j * alpha, 1.0), 1.0)
        hit = (y < eps_guard) | (y > 1 - eps_guard)
        if hit.any():
            bad |= hit
            y = np.where(hit, 0.5, y)
        total += f_obs(y)
    return sign * total, bad


@dataclass
class BirkhoffSample:
    q: int
    xs: object
    values: np.ndarray
    skipped: int
    remainder_bound: float = 0.0
    method: str = "direct"
    m: int = 1
    info: dict = field(default_factory=dict)

    @property
    def flagged(self):
        n = len(self.values) + self.skipped
        return n > 0 and self.skipped / n >= 1e-3


def birkhoff_sum(alpha, q, xs, eps_guard=EPS_GUARD):
    """f^(q) at the points xs; points whose orbit enters the eps_guard
    neighbourhood of 0 are dropped and counted."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    vals, bad = _orbit_sum(xs, q, alpha, eps_guard)
    if bad.all():
        raise AllPointsSkipped(f"all {len(xs)} points hit the guard band")
    return BirkhoffSample(q, xs[~bad], vals[~bad], int(bad.sum()))


def f_q(x, q):
    """sum_{k<q} f(x + k/q)."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for k in range(q):
        total += f_obs(np.mod(x + k / q, 1.0))
    return total


def f_tilde_q(x, q):
    """f_q(x/q) by direct summation, x in (0, 1)."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for k in range(q):
        total += f_obs((x + k) / q)
    return total


def f_tilde_closed(x, q):
    """Closed form -2q + 2q ln q - ln(Gamma(q+x) Gamma(q+1-x)) + ln(pi/sin(pi x)).

    For large q the Gamma terms are replaced by their Stirling expansion,
    which avoids the cancellation between 2q ln q and the log-Gammas.
    """
    x = np.asarray(x, dtype=float)
    if q < 10 ** 5:
        return (-2 * q + 2 * q * math.log(q) - special.gammaln(q + x)
                - special.gammaln(q + 1 - x) + np.log(np.pi / np.sin(np.pi * x)))
    return limit_profile(x) - stirling_remainder(x, q)


def stirling_remainder(x, q, terms=4):
    """R(x) with lnG(q+x) + lnG(q+1-x) = 2q ln q - 2q + ln(2 pi) + R(x):
    sum over odd k of 2 B_{k+1}(x) / (k (k+1) q**k)."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for k in range(1, 2 * terms, 2):
        bern = np.polynomial.polynomial.polyval(x, _bernoulli_poly(k + 1))
        total += 2 * bern / (k * (k + 1) * float(q) ** k)
    return total


def _bernoulli_poly(n):
    """Coefficients (ascending) of the Bernoulli polynomial B_n."""
    B = [float(special.bernoulli(n)[j]) for j in range(n + 1)]
    return [math.comb(n, j) * B[n - j] for j in range(n + 1)]


@dataclass
class FqValues:
    f_q: np.ndarray
    tilde_direct: np.ndarray
    tilde_closed: np.ndarray


def fq_exact(q, xs):
    """f_q(xs), and f_tilde_q(xs) both by direct summation and in closed form."""
    xs = np.asarray(xs, dtype=float)
    return FqValues(f_q(xs, q), f_tilde_q(xs, q), f_tilde_closed(xs, q))


def limit_profile(x):
    """ln(1/(2 sin(pi x)))."""
    x = np.asarray(x, dtype=float)
    return -np.log(2 * np.sin(np.pi * x))


def nu_cdf(y, m=1):
    """CDF of nu_m, the law of m ln(1/(2 sin(pi X))) with X uniform."""
    y = np.asarray(y, dtype=float)
    if m == 0:
        raise ValueError("m must be non-zero")
    z = np.exp(-y / m) / 2
    inner = np.where(z >= 1, 1.0, np.arcsin(np.minimum(z, 1.0)) * 2 / np.pi)
    if m > 0:
        return 1 - inner
    return inner


def nu_pdf(y, m=1):
    y = np.asarray(y, dtype=float)
    z = np.exp(-y / m) / 2
    ok = z < 1
    out = np.zeros_like(y)
    zz = z[ok]
    out[ok] = (2 / np.pi) * zz / (abs(m) * np.sqrt(1 - zz ** 2))
    return out


def ks_distance(samples, m=1):
    """Kolmogorov-Smirnov distance between the empirical law and nu_m."""
    return float(stats.kstest(np.asarray(samples), lambda y: nu_cdf(y, m)).statistic)


# rigid-time sampling ----------------------------------------------------

def _fq_cells(u, c, q, p_inv, Delta, near):
    """f^(q) at x = (c + u)/q for rotation by alpha = p/q + delta, where
    Delta = q**2 * delta, written as f_tilde_q(u) plus exact corrections for
    the ``near`` lattice cells next to 0 and 1."""
    base = f_tilde_closed(u, q)
    corr = np.zeros_like(u)
    cells = list(range(near)) + list(range(q - near, q))
    for i in set(c_ for c_ in cells if 0 <= c_ < q):
        # j with (c + j p) mod q == i, shifted by j * q * delta / q = j*Delta/q**2
        j = ((i - c) * p_inv) % q
        shift = j.astype(float) / q * Delta            # in units of 1/q
        num = i + u
        new = num + shift
        wrapped = (new <= 0) | (new >= q)
        ok = ~wrapped
        # f(y') - f(y), y = num/q, y' = new/q
        d = np.zeros_like(u)
        d[ok] = (-np.log1p(shift[ok] / num[ok])
                 - np.log1p(-shift[ok] / (q - num[ok])))
        if wrapped.any():
            y_new = np.mod(new[wrapped] / q, 1.0)
            d[wrapped] = f_obs(y_new) - f_obs(num[wrapped] / q)
        corr += d
    return base + corr


def sample_birkhoff(cf, k, m=1, samples=10 ** 6, seed=0, method="auto",
                    near=64, direct_limit=2000):
    """Samples of f^(m q_k)(x) for x uniform on (0, 1).

    Small q use direct summation.  Large q use the lattice decomposition:
    with x = (c + u)/q the orbit points are (i + u)/q + j_i delta, so the sum
    is f_tilde_q(u) plus corrections that matter only near the singular
    points; the rest is bounded by ``remainder_bound``.
    """
    rng = np.random.default_rng(seed)
    q, p = cf.q[k], cf.p[k]
    if method == "auto":
        method = "direct" if abs(m) * q <= direct_limit else "lattice"
    if method == "direct":
        s = birkhoff_sum(cf.alpha_float(), m * q, rng.random(samples))
        s.q, s.m = q, m
        return s
    with mpmath.workdps(cf.dps):
        delta = cf.alpha_mid() - mpmath.mpf(p) / q
        Delta = float(delta * q * q)            # q**2 (alpha - p/q)
    c = rng.integers(0, q, size=samples, dtype=np.int64) if q < 2 ** 62 else None
    if c is None:
        raise OverflowError("lattice sampling needs q below 2**62")
    u = rng.random(samples)
    p_inv = pow(p, -1, q) if q > 1 else 0
    total = np.zeros(samples)
    sgn = 1 if m > 0 else -1
    for s in range(abs(m)):
        # f^(-|m|q)(x) = -f^(|m|q)(x - |m| q alpha); q alpha = p + Delta/q
        step = (s if m > 0 else s - abs(m)) * Delta   # in units of 1/q
        uu = u + step
        cc = c + np.floor(uu).astype(np.int64)
        uu = uu - np.floor(uu)
        cc = np.mod(cc, q)
        total += _fq_cells(uu, cc, q, p_inv, Delta, near)
    L = near
    bound = abs(m) * 2 * abs(Delta) / q * (math.log(max(q / L, 1.0)) + 1.0)
    return BirkhoffSample(q, None, sgn * total, 0, bound, "lattice", m,
                          {"Delta": Delta})


def empirical_vs_nu(cf, m, k, samples=10 ** 6, seed=0):
    """KS distance between the law of f^(m q_k) and nu_m."""
    s = sample_birkhoff(cf, k, m, samples, seed=seed)
    return {"k": k, "q": cf.q[k], "m": m, "samples": samples, "seed": seed,
            "ks": ks_distance(s.values, m), "skipped": s.skipped,
            "flagged": s.flagged, "method": s.method,
            "remainder_bound": s.remainder_bound}


def denjoy_koksma_max(cf, n, samples=10 ** 4, seed=0):
    """max |sum_{j<q_n} sin(2 pi (x + j alpha))| over random x (bound: 4)."""
    rng = np.random.default_rng(seed)
    x = rng.random(samples)
    alpha = cf.alpha_float()
    total = np.zeros_like(x)
    for j in range(cf.q[n]):
        total += np.sin(2 * np.pi * (x + math.fmod(j * alpha, 1.0)))
    return float(np.max(np.abs(total)))
