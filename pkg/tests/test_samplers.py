from math import comb

import numpy as np
import pytest
from scipy import stats
from scipy.special import digamma, polygamma

from marginodds.diagnostics import ks_two_sample, mc_cf_estimate
from marginodds.errors import DegenerateWeightsWarning, DomainError
from marginodds.model import Partition, odds_ratio_2x2, split_log_odds
from marginodds.samplers import (
    STREAMS,
    WeightedSample,
    draw_log_theta,
    log_standard_gamma,
    posterior_constrained,
    posterior_dependent_example,
    posterior_double_constrained,
    posterior_unconstrained,
    sample_dirichlet,
    sample_log_dirichlet,
    standard_gamma,
    stream_rng,
)
from marginodds.special import cf_dependent_example

ROWS = Partition([[0, 1], [2, 3]])
ONES = np.ones(4)


@pytest.mark.parametrize("shape", [0.05, 0.3, 1.0, 2.5, 40.0])
def test_gamma_distribution(shape):
    g = standard_gamma(shape, stream_rng(1, "misc"), 20_000)
    assert stats.kstest(g, stats.gamma(shape).cdf).pvalue > 1e-3


def test_log_gamma_tiny_shape_is_finite():
    lg = log_standard_gamma(1e-3, stream_rng(2, "misc"), 50_000)
    assert np.all(np.isfinite(lg))
    # log G for shape a has mean digamma(a) and variance trigamma(a)
    se = np.sqrt(polygamma(1, 1e-3) / lg.size)
    assert abs(lg.mean() - digamma(1e-3)) < 4 * se


def test_dirichlet_marginals():
    alpha = np.array([0.5, 2.0, 3.5])
    d = sample_dirichlet(alpha, stream_rng(3, "misc"), 20_000)
    np.testing.assert_allclose(d.sum(axis=1), 1.0, atol=1e-12)
    for k in range(3):
        beta = stats.beta(alpha[k], alpha.sum() - alpha[k])
        assert stats.kstest(d[:, k], beta.cdf).pvalue > 1e-3


def test_log_dirichlet_is_normalized():
    ld = sample_log_dirichlet([0.01, 0.02, 5.0], stream_rng(4, "misc"), 1000)
    assert np.all(np.isfinite(ld))
    np.testing.assert_allclose(np.exp(ld).sum(axis=1), 1.0, atol=1e-12)


def test_streams_are_deterministic_and_distinct():
    a = stream_rng(5, "unconstrained").random(4)
    assert np.array_equal(a, stream_rng(5, "unconstrained").random(4))
    assert not np.array_equal(a, stream_rng(5, "constrained").random(4))
    assert not np.array_equal(a, stream_rng(6, "unconstrained").random(4))
    assert not np.array_equal(stream_rng(5, "misc", 0).random(4), stream_rng(5, "misc", 1).random(4))
    with pytest.raises(DomainError):
        stream_rng(5, "bogus")
    assert "calibration" in STREAMS


def test_posterior_determinism():
    x = [7, 1, 1, 1]
    s1 = posterior_unconstrained(ONES, x, odds_ratio_2x2(), 100, stream_rng(0, "unconstrained"))
    s2 = posterior_unconstrained(ONES, x, odds_ratio_2x2(), 100, stream_rng(0, "unconstrained"))
    assert np.array_equal(s1.values, s2.values)


def test_zero_contrast_gives_zero():
    s = posterior_constrained(ONES, [3, 1, 2, 0], ROWS, np.zeros((4, 2)), 50, stream_rng(0, "misc"))
    assert s.values.shape == (50, 2)
    assert np.all(s.values == 0.0)


def test_unconstrained_mean_digamma_oracle():
    # E[log theta_k] = digamma(a_k) - digamma(sum a) under Dirichlet(a)
    alpha, x = np.array([1.0, 0.5, 2.0, 1.0]), np.array([4, 0, 2, 3])
    a = alpha + x
    expected = digamma(a) @ odds_ratio_2x2()[:, 0]
    s = posterior_unconstrained(alpha, x, odds_ratio_2x2(), 100_000, stream_rng(7, "misc"))
    sd = np.sqrt(s.var()[0] / len(s))
    assert abs(s.mean()[0] - expected) < 4 * sd


def test_constrained_block_probabilities_keep_prior():
    alpha = np.array([1.0, 2.0, 3.0, 1.5])
    lt = draw_log_theta(alpha, [50, 0, 0, 1], ROWS, "constrained", 40_000, stream_rng(8, "misc"))
    row1 = np.exp(lt[:, :2]).sum(axis=1)
    assert stats.kstest(row1, stats.beta(3.0, 4.5).cdf).pvalue > 1e-3


def test_rho_same_under_both_schemes():
    alpha, x = np.array([0.7, 1.3, 2.0, 0.4, 1.0, 1.0]), np.array([5, 0, 2, 1, 3, 9])
    p = Partition([[0, 3], [1, 4, 5], [2]])
    c = np.array([1.0, -0.5, 0.3, 0.2, 0.8, -1.1])
    lt_u = draw_log_theta(alpha, x, p, "unconstrained", 100_000, stream_rng(9, "unconstrained"))
    lt_c = draw_log_theta(alpha, x, p, "constrained", 100_000, stream_rng(9, "constrained"))
    _, rho_u = split_log_odds(lt_u, c, p, log=True)
    _, rho_c = split_log_odds(lt_c, c, p, log=True)
    assert not ks_two_sample(rho_u[:, 0], rho_c[:, 0]).significant_at_01


@pytest.mark.parametrize("scheme", ["unconstrained", "constrained"])
def test_dependent_example_matches_closed_form(scheme):
    s = posterior_dependent_example(ONES, ONES, 200_000, stream_rng(10, "dependent"), scheme)
    t = np.linspace(-5, 5, 21)
    diff = np.abs(mc_cf_estimate(s, t) - cf_dependent_example(t, ONES, ONES, scheme))
    assert diff.max() < 1e-2


def test_double_constrained_weights():
    x = np.array([7, 1, 1, 1])
    s = posterior_double_constrained(ONES, x, 2000, stream_rng(11, "double"))
    # weight = C(8, 7) C(2, 1) psi^7 / sum_u C(8, u) C(2, 8 - u) psi^u
    psi = np.exp(s.values)
    norm = sum(comb(8, u) * comb(2, 8 - u) * psi**u for u in range(6, 9))
    np.testing.assert_allclose(s.weights, comb(8, 7) * comb(2, 1) * psi**7 / norm, rtol=1e-10)


def test_double_constrained_warns_on_degenerate_weights():
    with pytest.warns(DegenerateWeightsWarning):
        posterior_double_constrained(ONES, [300, 0, 0, 300], 2000, stream_rng(12, "double"))


def test_double_constrained_rejects_bigger_tables():
    with pytest.raises(DomainError):
        posterior_double_constrained(np.ones(6), [1] * 6, 10, stream_rng(0, "double"))


def test_weighted_sample_reductions():
    s = WeightedSample([1.0, 2.0, 4.0], [1.0, 1.0, 2.0])
    assert s.mean() == pytest.approx(2.75)
    assert s.var() == pytest.approx((1.75**2 + 0.75**2 + 2 * 1.25**2) / 4)
    assert s.effective_sample_size == pytest.approx(16 / 6)
    assert WeightedSample.unweighted(np.arange(5.0)).effective_sample_size == pytest.approx(5)
    with pytest.raises(DomainError):
        WeightedSample([1.0, 2.0], [0.0, 0.0])
    with pytest.raises(DomainError):
        WeightedSample([1.0, 2.0], [1.0, -1.0])
    with pytest.raises(DomainError):
        WeightedSample([1.0, 2.0], [1.0])
