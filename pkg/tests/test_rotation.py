from fractions import Fraction
import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from scs_lab.rotation import (convergents, cf_expand, cf_build, cf_build_liouville, golden_alpha,
                              parse_alpha, birkhoff_sum, f_obs, f_q, fq_exact, nu_cdf, nu_pdf,
                              ks_distance, sample_birkhoff, denjoy_koksma_max, _fq_cells,
                              AllPointsSkipped, PrecisionExhausted, MAX_DPS)

FIB = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610]


def test_convergents_recurrence():
    p, q = convergents([3, 7, 15, 1])
    assert q == [1, 3, 22, 333, 355]
    assert p == [0, 1, 7, 106, 113]
    # p_n q_{n-1} - p_{n-1} q_n alternates
    for n in range(1, len(q)):
        assert abs(p[n] * q[n - 1] - p[n - 1] * q[n]) == 1


def test_golden_is_all_ones():
    cf = golden_alpha(20)
    assert cf.quotients == [1] * 20
    assert cf.q[1:15] == FIB


def test_sqrt2_minus_one():
    cf = cf_expand(mpmath.iv.sqrt(2) - 1, 12, dps=60)
    assert cf.quotients == [2] * 12


def test_cf_build_roundtrip():
    cf = cf_build([3, 1, 4, 1, 5])
    again = cf_expand(cf.alpha, 5, dps=cf.dps)
    assert again.quotients == [3, 1, 4, 1, 5]


def test_cf_build_rejects_zero():
    with pytest.raises(ValueError):
        cf_build([2, 0, 1])


def test_decimal_alpha_stops_when_precision_runs_out():
    cf = parse_alpha("0.1234567", depth=40)
    assert cf.exhausted
    with pytest.raises(PrecisionExhausted):
        cf_expand("0.1234567", 40, strict=True)


def test_convergent_inequality_certified():
    for cf in (golden_alpha(25), cf_build_liouville(3, 4), cf_build([1, 5, 2, 9, 3, 3])):
        assert all(cf.convergent_bound_ok(n) for n in range(len(cf.q) - 1))


def test_liouville_quotients():
    cf = cf_build_liouville(3, 4)
    assert cf.q == [1, 2, 17, 83523, 83523 ** 3 * 83523 + 17]
    assert cf.quotients[1:] == [q ** 3 for q in cf.q[1:4]]


def test_liouville_diophantine_sequence_decreases():
    seq = cf_build_liouville(3, 5).dc_sequence()
    ratios = [r for r, _ in seq]
    uppers = [u for _, u in seq]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert all(u <= float(r) * (1 + 1e-12) for r, u in seq)
    assert uppers[-1] < 1e-4
    assert ratios[:3] == [Fraction(q ** 3, q ** 4 + p)
                          for q, p in zip([2, 17, 83523], [1, 2, 17])]


def test_golden_diophantine_sequence_grows():
    seq = golden_alpha(25).dc_sequence()
    uppers = [u for _, u in seq]
    assert all(a < b for a, b in zip(uppers[3:], uppers[4:]))


def test_constant_quotients_fail_diophantine_condition():
    # bounded quotients keep q_n**3 ||q_n alpha|| away from 0
    seq = cf_build([4] * 10).dc_sequence()
    assert min(u for _, u in seq[2:]) > 1


def test_precision_cap():
    with pytest.raises(PrecisionExhausted):
        cf_build_liouville(3, 9)
    assert MAX_DPS == 20000


def test_f_has_mean_zero():
    from scipy import integrate
    assert integrate.quad(lambda x: float(f_obs(x)), 0, 1, limit=200)[0] == pytest.approx(0, abs=1e-10)


def test_birkhoff_q1_is_f():
    xs = np.linspace(0.05, 0.95, 7)
    s = birkhoff_sum(0.3, 1, xs)
    assert np.allclose(s.values, f_obs(xs), rtol=0, atol=1e-15)
    assert s.skipped == 0


def test_birkhoff_cocycle():
    alpha = golden_alpha(20).alpha_float()
    xs = np.random.default_rng(3).random(200)
    n, k = 34, 21
    lhs = birkhoff_sum(alpha, n + k, xs).values
    rhs = birkhoff_sum(alpha, n, xs).values + birkhoff_sum(alpha, k, np.mod(xs + n * alpha, 1)).values
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_negative_time():
    alpha = golden_alpha(20).alpha_float()
    xs = np.random.default_rng(4).random(100)
    q = 21
    neg = birkhoff_sum(alpha, -q, xs).values
    pos = birkhoff_sum(alpha, q, np.mod(xs - q * alpha, 1)).values
    assert np.max(np.abs(neg + pos)) < 1e-8


def test_guard_band_skips_and_counts():
    s = birkhoff_sum(0.5, 2, np.array([0.25, 0.5, 0.75]))
    assert s.skipped == 1 and len(s.values) == 2
    with pytest.raises(AllPointsSkipped):
        birkhoff_sum(0.5, 2, np.array([0.0, 0.5]))


def test_fq_q1():
    xs = np.linspace(0.1, 0.9, 5)
    v = fq_exact(1, xs)
    assert np.allclose(v.tilde_direct, f_obs(xs), atol=1e-14)
    assert np.allclose(v.tilde_closed, f_obs(xs), atol=1e-12)


def test_fq_direct_matches_closed_form():
    xs = np.linspace(0.005, 0.995, 100)
    v = fq_exact(50, xs)
    assert np.max(np.abs(v.tilde_direct - v.tilde_closed)) < 1e-8


def test_fq_period():
    q = 13
    xs = np.random.default_rng(5).random(50) * (1 - 1 / q)
    assert np.max(np.abs(f_q(xs, q) - f_q(xs + 1 / q, q))) < 1e-10


def test_fq_and_tilde_share_a_law():
    q = 13
    a = f_q(np.random.default_rng(6).random(10 ** 6), q)
    b = fq_exact(q, np.random.default_rng(7).random(10 ** 6)).tilde_direct
    assert stats.ks_2samp(a, b).statistic < 2e-3


def test_nu_cdf_edges():
    assert nu_cdf(-math.log(2)) == pytest.approx(0, abs=1e-15)
    assert nu_cdf(60.0) == pytest.approx(1, abs=1e-12)
    assert nu_cdf(-5.0) == 0.0
    assert nu_cdf(5.0, m=-1) == 1.0


def test_nu_pdf_integrates():
    from scipy import integrate
    val = integrate.quad(lambda y: float(nu_pdf(np.array([y]))[0]), -math.log(2), 60, limit=400)[0]
    assert val == pytest.approx(1, abs=1e-6)


def test_ks_distance_exact_law():
    u = np.random.default_rng(8).random(10 ** 5)
    assert ks_distance(-np.log(2 * np.sin(np.pi * u))) < 0.01
    assert ks_distance(np.log(2 * np.sin(np.pi * u)), m=-1) < 0.01


def test_denjoy_koksma():
    cf = golden_alpha(20)
    for n in (5, 8, 11):
        assert denjoy_koksma_max(cf, n) <= 4


def test_lattice_matches_high_precision_sum():
    # at q = 83523 plain float summation drifts near the singular points, so
    # the reference is a 40-digit orbit sum
    cf = cf_build_liouville(3, 4)
    k = 3
    q, p = cf.q[k], cf.p[k]
    rng = np.random.default_rng(9)
    c = rng.integers(0, q, size=3)
    u = rng.random(3)
    with mpmath.workdps(cf.dps):
        Delta = float((cf.alpha_mid() - mpmath.mpf(p) / q) * q * q)
    lat = _fq_cells(u, c, q, pow(p, -1, q), Delta, 64)
    with mpmath.workdps(40):
        a = cf.alpha_mid()
        for i in range(3):
            x = (int(c[i]) + mpmath.mpf(float(u[i]))) / q
            ref = mpmath.fsum(-mpmath.log(y) - mpmath.log(1 - y) - 2
                              for y in (mpmath.frac(x + j * a) for j in range(q)))
            assert lat[i] == pytest.approx(float(ref), abs=1e-6)


def test_sample_birkhoff_method_choice():
    cf = cf_build_liouville(3, 4)
    assert sample_birkhoff(cf, 2, samples=100).method == "direct"
    s = sample_birkhoff(cf, 3, samples=100)
    assert s.method == "lattice" and s.values.shape == (100,)
