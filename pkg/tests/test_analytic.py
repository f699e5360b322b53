import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from windinglab import analytic
from windinglab.analytic import AlphaFamily, Verdict
from windinglab.errors import DomainError, InvalidFamilyError


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def cauchy_rejection_v(a, n=10**7, seed=20240611):
    """4 P(0 <= C2 <= a C1) for iid standard Cauchy, with its standard error."""
    rng = np.random.default_rng(seed)
    c1 = rng.standard_cauchy(n)
    c2 = rng.standard_cauchy(n)
    p = np.mean((c2 >= 0) & (c2 <= a * c1))
    return 4 * p, 4 * math.sqrt(p * (1 - p) / n)


def product_gauss_v(a, nodes=400):
    """Double integral over the wedge on a tensor Gauss-Legendre grid.

    Maps x = tan(phi) and y = a x v with (phi, v) in [0, pi/2] x [0, 1], so
    the integrand is a tan(phi) / (1 + (a v tan(phi))^2).
    """
    g, w = leggauss(nodes)
    phi = (g + 1) * math.pi / 4
    wphi = w * math.pi / 4
    v = (g + 1) / 2
    wv = w / 2
    tp = np.tan(phi)[:, None]
    f = a * tp / (1 + (a * v[None, :] * tp) ** 2)
    return 4 / math.pi**2 * float(wphi @ f @ wv)


def dblquad_v(a):
    f = lambda y, x: 1 / ((1 + x * x) * (1 + y * y))
    val, _ = integrate.dblquad(f, 0, np.inf, 0, lambda x: a * x, epsabs=1e-12)
    return 4 / math.pi**2 * val


def test_v_of_matches_cauchy_rejection():
    for a in (0.25, 1.0, 2.0, 4.0):
        est, se = cauchy_rejection_v(a)
        assert abs(analytic.v_of(a) - est) <= 3 * se


def test_q_prob_matches_paired_cauchy_draws():
    rng = np.random.default_rng(77)
    n = 10**7
    c1 = rng.standard_cauchy(n)
    c2 = 2.0 * rng.standard_cauchy(n)
    p = np.mean(np.abs(c1) > np.abs(c2))
    se = math.sqrt(p * (1 - p) / n)
    assert abs(analytic.q_prob(math.e, math.e**2) - p) <= 3 * se


@pytest.mark.parametrize("a", [0.1, 0.5, 1.0, 3.0, 20.0])
def test_single_integral_reduction_against_2d_rules(a):
    v = analytic.v_of(a)
    assert v == pytest.approx(dblquad_v(a), abs=1e-8)
    assert v == pytest.approx(product_gauss_v(a), abs=2e-4)


def test_density_normalises():
    # tanh-sinh nodes next to 1 round to 1.0 in double precision, so the
    # upper half comes from the reflection symmetry
    half = mpmath.quad(lambda u: analytic.maxtime_density(float(u)), [0, 0.25, 0.5])
    assert abs(2 * float(half) - 1.0) <= 1e-8
    total, _ = integrate.quad(analytic.maxtime_density, 0, 1, points=[0.5], epsabs=1e-13, limit=200)
    assert abs(total - 1.0) <= 1e-8


def test_density_integrates_to_cdf():
    for u in (0.1, 0.3, 0.6, 0.9):
        val, _ = integrate.quad(analytic.maxtime_density, 0, u, points=[0.5] if u > 0.5 else None,
                                epsabs=1e-12, limit=200)
        assert val == pytest.approx(analytic.maxtime_cdf(u), abs=1e-8)


@pytest.mark.parametrize("c", [0.5, 0.9, 1.0, 1.1, 2.0, 10.0])
def test_v_prime_matches_finite_difference(c):
    h = 1e-4
    fd = (analytic.v_of(c + h, 1e-12) - analytic.v_of(c - h, 1e-12)) / (2 * h)
    assert abs(fd - analytic.v_prime(c)) <= 1e-6


@pytest.mark.parametrize("u", np.round(np.arange(0.1, 0.95, 0.1), 1))
def test_density_matches_cdf_finite_difference(u):
    h = 1e-4
    fd = (analytic.maxtime_cdf(u + h, 1e-12) - analytic.maxtime_cdf(u - h, 1e-12)) / (2 * h)
    assert abs(fd - analytic.maxtime_density(u)) <= 1e-5


# ---------------------------------------------------------------------------
# worked values
# ---------------------------------------------------------------------------

def test_v_of_boundaries():
    assert analytic.v_of(0.0) == 0.0
    assert analytic.v_of(1.0) == pytest.approx(0.5, abs=1e-10)


def test_maxtime_cdf_values():
    assert analytic.maxtime_cdf(0.0) == 0.0
    assert analytic.maxtime_cdf(1.0) == 1.0
    assert analytic.maxtime_cdf(0.5) == pytest.approx(0.5, abs=1e-10)
    assert analytic.maxtime_cdf(0.25) + analytic.maxtime_cdf(0.75) == pytest.approx(1.0, abs=2e-10)


NORM = 4 / math.pi**2


def test_density_values():
    assert analytic.maxtime_density(0.5) == pytest.approx(2 * NORM, rel=1e-15)
    assert analytic.maxtime_density(0.3) == pytest.approx(analytic.maxtime_density(0.7), abs=1e-12)
    # both sides of the series switch agree with the quotient
    for u in (0.5 + 1.5e-4, 0.5 + 2.5e-4, 0.5 - 1e-5):
        w = 2 * u - 1
        exact = NORM * float(mpmath.log(mpmath.mpf(u) / (1 - mpmath.mpf(u))) / w)
        assert analytic.maxtime_density(u) == pytest.approx(exact, rel=1e-11)


def test_v_prime_values():
    assert analytic.v_prime(1.0) == pytest.approx(0.5 * NORM, rel=1e-15)
    assert analytic.v_prime(math.e) == pytest.approx(NORM / (math.e**2 - 1), rel=1e-14)
    for c in (1 + 5e-5, 1 - 3e-5, 1 + 2e-4):
        exact = NORM * float(mpmath.log(c) / (mpmath.mpf(c) ** 2 - 1))
        assert analytic.v_prime(c) == pytest.approx(exact, rel=1e-11)


def test_cauchy_and_spitzer_values():
    assert analytic.cauchy_cdf(0.0, 3.0) == 0.5
    assert analytic.cauchy_cdf(2.0, 2.0) == pytest.approx(0.75, abs=1e-15)
    assert analytic.cauchy_cdf(-2.0, 2.0) == pytest.approx(0.25, abs=1e-15)
    assert analytic.spitzer_cdf(0.0) == 0.5
    assert analytic.spitzer_cdf(1.0) == pytest.approx(0.75, abs=1e-15)
    assert analytic.spitzer_cdf(-1.0) == pytest.approx(0.25, abs=1e-15)
    xs = np.array([-3.0, 0.0, 1.0])
    assert np.allclose(analytic.cauchy_cdf(xs, 1.0), [analytic.spitzer_cdf(x) for x in xs])


def test_q_prob_values():
    assert analytic.q_prob(math.e, math.e) == pytest.approx(0.5, abs=1e-10)
    assert analytic.q_prob(math.e**2, math.e) == pytest.approx(analytic.v_of(2.0), abs=1e-12)


def test_domain_errors():
    for bad in (-1.0, math.nan, math.inf):
        with pytest.raises(DomainError):
            analytic.v_of(bad)
    with pytest.raises(DomainError):
        analytic.v_of(1.0, tol=1e-3)
    for bad in (-0.1, 1.1):
        with pytest.raises(DomainError):
            analytic.maxtime_cdf(bad)
    for bad in (0.0, 1.0):
        with pytest.raises(DomainError):
            analytic.maxtime_density(bad)
    with pytest.raises(DomainError):
        analytic.v_prime(0.0)
    with pytest.raises(DomainError):
        analytic.cauchy_cdf(1.0, 0.0)
    with pytest.raises(DomainError):
        analytic.q_prob(1.0, 2.0)


def test_adaptive_simpson_on_known_integrals():
    assert analytic.adaptive_simpson(math.sin, 0, math.pi) == pytest.approx(2.0, abs=1e-10)
    assert analytic.adaptive_simpson(math.sqrt, 0, 1) == pytest.approx(2 / 3, abs=1e-9)
    assert analytic.adaptive_simpson(math.exp, 1, 1) == 0.0


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def test_v_of_monotone_on_grid():
    a = np.linspace(0, 100, 1000)
    v = np.array([analytic.v_of(x) for x in a])
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) >= -2e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-4, 1e4))
def test_v_reciprocal_symmetry(a):
    assert abs(analytic.v_of(a) + analytic.v_of(1 / a) - 1) <= 2e-10


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-9, 1 - 1e-9))
def test_density_reflection_symmetry(u):
    # only where 1 - u is exact does the reflection point exist in floating point
    assume(1 - (1 - u) == u)
    assert abs(analytic.maxtime_density(u) - analytic.maxtime_density(1 - u)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e6, 1e6), st.floats(1e-3, 1e3))
def test_cauchy_cdf_symmetry(x, gamma):
    assert abs(analytic.cauchy_cdf(x, gamma) + analytic.cauchy_cdf(-x, gamma) - 1) <= 1e-15


# ---------------------------------------------------------------------------
# integral test
# ---------------------------------------------------------------------------

CLOSED_FORMS = {
    # partial integral from s0 to S in s = log log t
    "InvLogLogPow(1, 2)": lambda s0, S: 2 * ((math.log(s0) + 1) / s0 - (math.log(S) + 1) / S),
    "InvLogLogPow(1, 1)": lambda s0, S: (math.log(S) ** 2 - math.log(s0) ** 2) / 2,
    "InvLogPow(1, 1)": lambda s0, S: (s0 + 1) * math.exp(-s0) - (S + 1) * math.exp(-S),
}


@pytest.mark.parametrize("family,expected", [
    (AlphaFamily.inv_loglog_pow(1, 2), Verdict.CONVERGES),
    (AlphaFamily.inv_loglog_pow(1, 1), Verdict.DIVERGES),
    (AlphaFamily.inv_log_pow(1, 1), Verdict.CONVERGES),
])
def test_integral_test_builtin_families(family, expected):
    verdict = analytic.integral_test(family)
    assert verdict.classification is expected
    closed = CLOSED_FORMS[family.label]
    for limit, value in verdict.tail_estimates:
        assert value == pytest.approx(closed(family.start, limit), rel=1e-9, abs=1e-12)
    values = [v for _, v in verdict.tail_estimates]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_assumption_predicate():
    # 2 alpha(t^e) >= alpha(t) becomes p log((s+1)/s) <= log 2 for InvLogLogPow
    assert analytic.integral_test(AlphaFamily.inv_loglog_pow(1, 2)).assumption_holds
    assert analytic.integral_test(AlphaFamily.inv_loglog_pow(1, 1)).assumption_holds
    # and q <= log 2 for InvLogPow
    assert not analytic.integral_test(AlphaFamily.inv_log_pow(1, 1)).assumption_holds
    assert analytic.integral_test(AlphaFamily.inv_log_pow(1, 0.5)).assumption_holds


def test_custom_family_matches_parametric():
    # log t = e^s overflows past s ~ 709, so tables and limits stay below that
    limits = (5.0, 10.0, 20.0, 40.0, 80.0, 160.0)
    s = np.linspace(3.0, 160.0, 20000)
    table = AlphaFamily.custom(np.exp(s), np.exp(-s))
    direct = analytic.integral_test(AlphaFamily.inv_log_pow(1, 1), limits)
    tab = analytic.integral_test(table, limits)
    assert tab.classification is Verdict.CONVERGES
    assert tab.tail_estimates[-1][1] == pytest.approx(direct.tail_estimates[-1][1], rel=1e-4)
    with pytest.raises(DomainError):
        analytic.integral_test(table, (5.0, 10.0, 1000.0))


def test_slow_decay_is_inconclusive():
    # alpha = (log log t)^-1.1 converges, but far too slowly to certify by 1e9
    verdict = analytic.integral_test(AlphaFamily.inv_loglog_pow(1, 1.1))
    assert verdict.classification is Verdict.INCONCLUSIVE


def test_invalid_families():
    with pytest.raises(InvalidFamilyError):
        analytic.integral_test(AlphaFamily.inv_loglog_pow(1, -1))
    with pytest.raises(InvalidFamilyError):
        analytic.integral_test(AlphaFamily.inv_log_pow(0, 1))
    with pytest.raises(InvalidFamilyError):
        analytic.integral_test(AlphaFamily.inv_log_pow(1, 1, start=0.5))
    with pytest.raises(InvalidFamilyError):
        AlphaFamily.custom([1.0, 1.0], [0.5, 0.4])
    s = np.linspace(3.0, 100.0, 50)
    with pytest.raises(InvalidFamilyError):
        analytic.integral_test(AlphaFamily.custom(np.exp(s), 1 + 0.01 * s), (10.0, 50.0, 100.0))
    with pytest.raises(DomainError):
        analytic.integral_test(AlphaFamily.inv_log_pow(1, 1), limits=[10.0, 5.0])
