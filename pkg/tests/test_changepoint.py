import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import gammaln

from resir.changepoint import (Case1Hyper, Case2Hyper, ChangePointParams, ChangePointSample,
                               DisasterSeries, GridPrior, exact_posterior, log_likelihood,
                               log_likelihood_batch, posterior_pool, posterior_sir,
                               run_changepoint, sample_prior_case1, sample_prior_case2,
                               Case1Prior, Case2Prior, standard_gamma, summarize, summarize_means)
from resir.rng import RngStream
from resir.sir import Scheme, pool_from_log_weights, resample_indices

TOY = DisasterSeries([1, 2, 0, 3])


def test_toy_likelihood_by_hand():
    p = ChangePointParams(2, 1.0, 2.0)
    assert log_likelihood(p, TOY) == pytest.approx(-6 + 3 * math.log(2), rel=1e-14)


def test_equal_rates_remove_theta():
    vals = [log_likelihood(ChangePointParams(t, 1.7, 1.7), TOY) for t in (1, 2, 3)]
    assert vals == pytest.approx([vals[0]] * 3, rel=1e-14)


def test_all_zero_counts():
    data = DisasterSeries(np.zeros(112, dtype=int))
    for theta, l1, l2 in [(1, 0.5, 2.0), (40, 3.1, 0.9), (111, 1.0, 1.0)]:
        got = log_likelihood(ChangePointParams(theta, l1, l2), data)
        assert got == pytest.approx(-(theta * l1 + (112 - theta) * l2), rel=1e-14)


def test_batch_matches_direct_sum():
    rs = RngStream(4)
    counts = (rs.uniforms(30) * 6).astype(int)
    data = DisasterSeries(counts)
    for theta in (1, 7, 29):
        l1, l2 = 2.5, 0.7
        direct = sum(c * math.log(l1) - l1 for c in counts[:theta]) + sum(
            c * math.log(l2) - l2 for c in counts[theta:])
        assert log_likelihood_batch(theta, l1, l2, data) == pytest.approx(direct, rel=1e-12)
    with pytest.raises(ValueError):
        log_likelihood_batch(30, 1.0, 1.0, data)


def test_series_validation():
    with pytest.raises(ValueError):
        DisasterSeries([1, -1, 2])
    with pytest.raises(ValueError):
        DisasterSeries([1.5, 2])


def test_params_validation():
    with pytest.raises(ValueError):
        ChangePointParams(0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ChangePointParams(3, -1.0, 1.0)
    with pytest.raises(ValueError):
        ChangePointParams(3, 1.0, 0.3, Case2Hyper(a=1.0, alpha=0.5))
    with pytest.raises(ValueError):
        ChangePointParams(3, 1.0, 3.0, Case2Hyper(a=1.0, alpha=3.0))
    ChangePointParams(3, 1.0, 0.5, Case2Hyper(a=1.0, alpha=0.5))


# -- gamma sampler -----------------------------------------------------------

@pytest.mark.parametrize("shape", [0.5, 1.0, 3.0, 10.0])
def test_marsaglia_tsang_matches_gamma_cdf(shape):
    x = standard_gamma(shape, RngStream(int(shape * 10)), 100_000)
    assert stats.kstest(x, stats.gamma(shape).cdf).statistic < 0.01


# -- priors --------------------------------------------------------------------

def test_single_prior_draws_are_params():
    p1 = sample_prior_case1(RngStream(1))
    p2 = sample_prior_case2(RngStream(1))
    assert isinstance(p1.hyper, Case1Hyper) and isinstance(p2.hyper, Case2Hyper)
    assert 1 <= p1.theta <= 111 and 1 <= p2.theta <= 111


def test_case1_prior_moments():
    d = Case1Prior().draw(RngStream(21), 100_000)
    assert d.theta.min() >= 1 and d.theta.max() <= 111
    freq = np.bincount(d.theta, minlength=112)[1:] / d.theta.size
    se = math.sqrt((1 / 111) * (1 - 1 / 111) / d.theta.size)
    assert np.all(np.abs(freq - 1 / 111) < 4.5 * se)
    for a in (d.hyper["a1"], d.hyper["a2"]):
        assert a.mean() == pytest.approx(1.0, abs=0.03)
    for lam in (d.lambda1, d.lambda2):
        assert lam.mean() == pytest.approx(3 * 10 / 9, abs=0.1)
    # the two regimes are drawn independently
    assert abs(np.corrcoef(d.lambda1, d.lambda2)[0, 1]) < 0.02


def test_case2_prior():
    d = Case2Prior().draw(RngStream(22), 100_000)
    alpha = d.hyper["alpha"]
    assert alpha.min() >= 1 / 8 and alpha.max() <= 2
    assert np.median(alpha) == pytest.approx(0.5, abs=0.02)
    assert np.all(d.lambda2 == alpha * d.lambda1)
    assert d.hyper["a"].mean() == pytest.approx(1.0, abs=0.03)


# -- posterior -------------------------------------------------------------------

def test_factorial_constant_does_not_change_resampling():
    data = DisasterSeries([4, 5, 0, 1, 3, 2, 0, 1])
    draws = Case1Prior(data.max_theta).draw(RngStream(3), 300)
    ll = log_likelihood_batch(draws.theta, draws.lambda1, draws.lambda2, data)
    full = ll - np.sum(gammaln(data.counts + 1))
    a = pool_from_log_weights(draws.to_matrix(), ll)
    b = pool_from_log_weights(draws.to_matrix(), full)
    np.testing.assert_allclose(a.weights, b.weights, rtol=1e-12)
    for scheme in Scheme:
        np.testing.assert_array_equal(resample_indices(a, 100, scheme, RngStream(9)),
                                      resample_indices(b, 100, scheme, RngStream(9)))


def test_constant_series_has_no_change_signal():
    data = DisasterSeries(np.full(112, 2))
    out = posterior_sir(data, 1, "sir", 50_000, 5000, RngStream(5))
    assert out.lambda1.mean() == pytest.approx(2.0, abs=0.25)
    assert out.lambda2.mean() == pytest.approx(2.0, abs=0.25)
    # theta stays spread over the range instead of locking onto one year
    assert out.theta.std() > 15


def test_case2_coupling_survives_resampling():
    data = DisasterSeries([3, 4, 2, 5, 1, 0, 1, 0, 0, 1])
    for scheme in Scheme:
        out = posterior_sir(data, 2, scheme, 2000, 500, RngStream(8))
        alpha = out.hyper["alpha"]
        assert np.all(out.lambda2 == alpha * out.lambda1)
        assert isinstance(out[0].hyper, Case2Hyper)


def _toy_grid():
    thetas, l1s, l2s = [], [], []
    for t in range(1, 6):
        for l1 in np.linspace(0.5, 5.0, 10):
            for l2 in np.linspace(0.25, 3.0, 10):
                thetas.append(t)
                l1s.append(l1)
                l2s.append(l2)
    n = len(thetas)
    return GridPrior(np.array(thetas), np.array(l1s), np.array(l2s), np.full(n, 1.0 / n))


def grid_frequencies(prior, out):
    key = {(t, a, b): i for i, (t, a, b) in enumerate(zip(prior.theta, prior.lambda1, prior.lambda2))}
    idx = np.array([key[(t, a, b)] for t, a, b in zip(out.theta, out.lambda1, out.lambda2)])
    return np.bincount(idx, minlength=len(prior.probs)) / len(out)


def sir_frequency_variance(post, prior_probs, N, n):
    """Binomial resampling variance plus the delta-method variance of the
    self-normalized pool weights (prior as proposal)."""
    prior_probs = np.asarray(prior_probs, dtype=float)
    s = np.sum(post**2 / prior_probs)
    pool = (post**2 / prior_probs * (1 - post) ** 2 + post**2 * (s - post**2 / prior_probs)) / N
    return post * (1 - post) / n + pool


@pytest.mark.parametrize("scheme", list(Scheme))
def test_grid_posterior_matches_enumeration(scheme):
    data = DisasterSeries([4, 5, 3, 1, 0, 1])
    prior = _toy_grid()
    exact = exact_posterior(prior, data)
    N, n = 1_000_000, 10_000
    out = posterior_sir(data, prior, scheme, N, n, RngStream(17))
    freq = grid_frequencies(prior, out)
    big = exact >= 0.01
    se = np.sqrt(sir_frequency_variance(exact, prior.probs, N, n))
    assert np.all(np.abs(freq[big] - exact[big]) <= 3 * se[big])


def test_summarize_examples():
    runs = [ChangePointSample(np.array([39, 39]), np.array([3.0, 3.2]), np.array([1.0, 0.9]))] * 3
    res = summarize(runs)
    assert res["theta"] == (39.0, 0.0)
    means = np.array([[39.0, 3.0, 1.0], [41.0, 3.0, 1.0]])
    res = summarize_means(means)
    assert res["theta"] == pytest.approx((40.0, 1.0))
    with pytest.raises(ValueError):
        summarize(runs[:1])


def test_run_changepoint_matches_direct_posterior():
    data = DisasterSeries([4, 5, 3, 4, 1, 0, 1, 0])
    means, modes = run_changepoint(data, 1, ["sir", "lhs-sir"], 400, 100, 3, seed=12)
    from resir.rng import child_stream

    for k in range(3):
        direct = posterior_sir(data, 1, "lhs-sir", 400, 100, child_stream(12, k))
        np.testing.assert_allclose(means[Scheme.LATIN_HYPERCUBE][k], direct.means(), rtol=1e-15)
    assert modes[Scheme.PLAIN].shape == (3,)


def test_pool_columns():
    pool, case, names = posterior_pool(TOY, 1, 10, RngStream(1))
    assert case == 1 and names == ("a1", "a2") and pool.samples.shape == (10, 5)
