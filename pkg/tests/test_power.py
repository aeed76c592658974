import math

import mpmath
import numpy as np
import pytest

import oracles as O

from swaptest.core import ValidationError
from swaptest.power import (
    PowerQuery,
    detectable,
    min_gap_binary,
    min_gap_linear,
    norm_cdf,
    norm_ppf,
    odc_deviation_binary,
    odc_deviation_linear,
    odc_integral,
    odc_monte_carlo,
    rho_n,
    win_rate,
)
from swaptest.scores import ScoreFunction
from swaptest.simgen import gmm_sampler, linear_sampler, swapped_sampler

Q = PowerQuery(1000, 0.1, 0.1)


def test_rho_n_oracle():
    assert rho_n(Q) == pytest.approx(O.RHO_N1000, rel=1e-14)
    assert rho_n(PowerQuery(5000, 0.1, 0.1)) == pytest.approx(O.RHO_N5000, rel=1e-14)


def test_rho_n_large_n_limit():
    assert rho_n(PowerQuery(10**12, 0.1, 0.1, 0.07)) == pytest.approx(0.07, abs=1e-5)


def test_query_validation():
    for args in [(0, 0.1, 0.1), (10, 1.5, 0.1), (10, 0.1, 0), (10, 0.1, 0.1, -1), (2.5, 0.1, 0.1)]:
        with pytest.raises(ValidationError):
            PowerQuery(*args)


def test_normal_cdf_roundtrip():
    for u in np.linspace(1e-6, 1 - 1e-6, 1001):
        assert abs(norm_cdf(norm_ppf(u)) - u) < 1e-10
    for x in (-7.5, -2.0, 0.3, 4.0):
        assert float(norm_cdf(x)) == pytest.approx(float(mpmath.ncdf(x)), rel=1e-13)


def test_odc_linear_pinned_case():
    val = odc_deviation_linear([1, 5], [1, 5], 1.0, (0, 1))
    assert val == pytest.approx(O.ODC_LINEAR_PINNED, rel=1e-13)
    assert odc_deviation_linear([1, 5], [1, 5], 1.0, (0, 1), signed=True) == val


def test_odc_linear_nulls():
    assert odc_deviation_linear([1, 5, 2], [3, 3, 1], 1.0, (0, 1)) == 0.0
    assert odc_deviation_linear([2, 2, 1], [0.5, 3.0, 1.0], 0.7, (0, 1)) == pytest.approx(0.0, abs=1e-16)


def test_odc_binary_pinned_case():
    assert odc_deviation_binary([0, 1], [1, -1], (0, 1)) == pytest.approx(O.ODC_BINARY_PINNED, rel=1e-13)
    assert odc_deviation_binary([0, 1], [1, -1], (0, 1), signed=True) == pytest.approx(O.ODC_BINARY_PINNED, rel=1e-13)


def test_odc_binary_nulls_and_errors():
    assert odc_deviation_binary([1, 1, 2], [1, -1, 3], (0, 1)) == 0.0
    assert odc_deviation_binary([0, 1, 2], [2, 2, 3], (0, 1)) == 0.0
    with pytest.raises(ValidationError):
        odc_deviation_binary([0, 1], [0, 0], (0, 1))
    with pytest.raises(ValidationError):
        odc_deviation_binary([0, 1, 2], [1, 1], (0, 1))


def test_min_gap_linear_chain():
    # |theta_hat - theta*|^2 = 1, contrast |theta_hat_i - theta_hat_j| = 1
    gap = min_gap_linear(Q, [0.0, 0.0], [1.0, 0.0], 1.0, (0, 1))
    assert gap == pytest.approx(O.MIN_GAP_LINEAR, rel=1e-12)


def test_min_gap_linear_edge_cases():
    assert min_gap_linear(Q, [1, 2], [3, 3], 1.0, (0, 1)) is None
    assert min_gap_linear(PowerQuery(10, 0.1, 0.1), [0, 0], [1, 0], 1.0, (0, 1)) is None
    big = min_gap_linear(PowerQuery(10**14, 0.1, 0.1), [0, 0], [1, 0], 1.0, (0, 1))
    assert 0 < big < 1e-5


def test_min_gap_linear_is_tight():
    # at theta* gap equal to the threshold the closed-form deviation meets rho_n
    theta_hat = np.array([1.0, 0.0, 0.5])
    gap = min_gap_linear(Q, np.zeros(3), theta_hat, 1.0, (0, 1))
    assert gap is not None
    sigma_sq = 1.0 + np.sum(theta_hat**2)
    # lower bound on the deviation: (2/pi) arctan(c / (2 (err + c))) with c = contrast * gap
    c = gap * abs(theta_hat[0] - theta_hat[1])
    assert (2 / math.pi) * math.atan(c / (2 * (sigma_sq + c))) == pytest.approx(rho_n(Q), rel=1e-12)


def test_min_gap_binary_chain():
    q = PowerQuery(5000, 0.1, 0.1)
    assert min_gap_binary(q, [1, -1], (0, 1)) == pytest.approx(O.MIN_GAP_BINARY, rel=1e-12)
    # doubling |theta_hat| with the contrast fixed doubles the gap
    th = np.array([1.0, -1.0, 3.0])
    th2 = np.array([1.0, -1.0, math.sqrt(4 * 11 - 2)])
    assert min_gap_binary(q, th2, (0, 1)) == pytest.approx(2 * min_gap_binary(q, th, (0, 1)), rel=1e-12)


def test_min_gap_binary_edge_cases():
    assert min_gap_binary(Q, [1, 1], (0, 1)) is None
    assert min_gap_binary(PowerQuery(3, 0.1, 0.1), [1, -1], (0, 1)) is None
    assert min_gap_binary(PowerQuery(10**14, 0.1, 0.1), [1, -1], (0, 1)) < 1e-5
    # tau does not enter the mixture threshold
    assert min_gap_binary(PowerQuery(5000, 0.1, 0.1, 0.2), [1, -1], (0, 1)) == min_gap_binary(
        PowerQuery(5000, 0.1, 0.1), [1, -1], (0, 1)
    )


def test_detectable():
    assert detectable(0.06, Q) and not detectable(0.05, Q)
    assert not detectable(0.06, Q, tau_x=0.01)


def test_odc_integral_simple():
    # F = G gives zero up to the grid error
    x = np.random.default_rng(0).standard_normal(20000)
    assert abs(odc_integral(x, x)) < 1e-4
    # F shifted left of G: F(G^-1(u)) > u everywhere
    assert odc_integral(x - 1, x) > 0.2
    with pytest.raises(ValidationError):
        odc_integral([], x)


def test_identical_samplers_give_zero():
    s = linear_sampler([1.0, 2.0])
    score = ScoreFunction.linear_residual([1.0, 2.0])
    est = odc_monte_carlo(score, s, s, 20000, seed=3)
    assert abs(est.deviation) <= 3 * est.std_error


def test_odc_monte_carlo_matches_pinned_linear():
    base = linear_sampler([1.0, 5.0], 1.0)
    score = ScoreFunction.linear_residual([1.0, 5.0])
    est = odc_monte_carlo(score, base, swapped_sampler(base, (0, 1)), 10**5, seed=12)
    target = O.ODC_LINEAR_PINNED
    assert abs(est.deviation - target) <= 3 * est.std_error
    assert est.n_mc == 10**5 and 0 < est.std_error < 0.01


def test_win_rate_identity():
    base = gmm_sampler([0.0, 1.0], 0.5)
    score = ScoreFunction.classification_margin([1.0, -1.0])
    n_mc = 50000
    est, f, g = odc_monte_carlo(score, base, swapped_sampler(base, (0, 1)), n_mc, seed=5, return_samples=True)
    pi_hat = win_rate(f, g)
    # int G(F^-1(u)) du is the integral with the arguments exchanged, plus 1/2
    integral = odc_integral(g, f) + 0.5
    assert abs(integral - pi_hat) <= 2 / math.sqrt(n_mc)
    assert abs(est.deviation - odc_deviation_binary([0, 1], [1, -1], (0, 1), signed=True)) <= 3 * est.std_error


def test_odc_monte_carlo_reproducible_and_validated():
    base = linear_sampler([1.0, 2.0])
    score = ScoreFunction.linear_residual([0.0, 0.0])
    a = odc_monte_carlo(score, base, swapped_sampler(base, (0, 1)), 1000, seed=1, n_boot=20)
    b = odc_monte_carlo(score, base, swapped_sampler(base, (0, 1)), 1000, seed=1, n_boot=20)
    assert a == b
    with pytest.raises(ValidationError):
        odc_monte_carlo(score, base, base, 10, seed=1)
