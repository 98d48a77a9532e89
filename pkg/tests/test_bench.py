import numpy as np
import pytest

from resir.bench import (ExperimentConfig, ReplicateError, bench, compare_schemes, estimate_mean,
                         mse, omse, run_replications)
from resir.densities import parse_distribution
from resir.rng import child_stream
from resir.sir import Scheme, build_pool, resample


def test_estimate_mean_examples():
    np.testing.assert_array_equal(estimate_mean([[2.5, 1.0]] * 4), [2.5, 1.0])
    np.testing.assert_array_equal(estimate_mean([1.0, 3.0]), [2.0])
    np.testing.assert_array_equal(estimate_mean([[0, 1], [2, 3], [4, 5]]), [2.0, 3.0])
    with pytest.raises(ValueError):
        estimate_mean(np.empty((0, 2)))


def test_mse_examples():
    np.testing.assert_array_equal(mse([[1.0, 2.0]] * 3), [0.0, 0.0])
    np.testing.assert_allclose(mse([1.0, 3.0]), [1.0])
    np.testing.assert_allclose(mse([1.0, 3.0], center=[0.0]), [5.0])
    with pytest.raises(ValueError):
        mse([[1.0, 2.0]], center=[0.0])


def test_omse_examples():
    assert omse([0, 0, 0, 0]) == 0
    assert omse([1, 2]) == 3
    assert omse([0.008897, 0.006810, 0.01227, 0.01561]) == pytest.approx(0.04359, abs=5e-6)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("beta(2,3)", "unif(0,1)", N=10, n=20, K=1)
    with pytest.raises(ValueError):
        ExperimentConfig("beta(2,3)", "unif(0,1)", N=10, n=5, K=0)
    with pytest.raises(ValueError):
        ExperimentConfig("kotz", "unif(0,1)", N=10, n=5, K=1)


def _cfg(**kw):
    base = dict(target="beta(2,3)", proposal="unif(0,1)", N=500, n=50, K=8, seed=11)
    base.update(kw)
    return ExperimentConfig(**base)


def test_single_replicate_equals_manual_chain():
    cfg = _cfg(K=1, scheme="lhs-sir")
    stream = child_stream(11, 0)
    pool = build_pool(cfg.target, cfg.proposal, cfg.N, stream)
    manual = resample(pool, cfg.n, Scheme.LATIN_HYPERCUBE, stream).mean(axis=0)
    np.testing.assert_array_equal(run_replications(cfg)[0], manual)


def test_schemes_share_pool_draws():
    for k in range(3):
        pools = [build_pool(_cfg().target, _cfg().proposal, 500, child_stream(11, k))
                 for _ in Scheme]
        for p in pools[1:]:
            np.testing.assert_array_equal(p.samples, pools[0].samples)


def test_replicate_alone_equals_batch():
    batch = run_replications(_cfg(K=6, scheme="anti-sir"))
    for k in range(6):
        stream = child_stream(11, k)
        pool = build_pool(_cfg().target, _cfg().proposal, 500, stream)
        alone = resample(pool, 50, "anti-sir", stream).mean(axis=0)
        np.testing.assert_array_equal(batch[k], alone)


def test_compare_schemes_matches_separate_runs():
    cfg = _cfg()
    shared, times = compare_schemes(cfg, list(Scheme))
    for s in Scheme:
        np.testing.assert_array_equal(shared[s], run_replications(_cfg(scheme=s)))
        assert times[s] > 0


def test_parallel_equals_serial():
    cfg = _cfg(K=10)
    np.testing.assert_array_equal(run_replications(cfg, workers=1),
                                  run_replications(cfg, workers=3))


def test_reproducible_reports():
    a = bench(_cfg())
    b = bench(_cfg())
    for ra, rb in zip(a, b):
        np.testing.assert_array_equal(ra.estimates, rb.estimates)
        assert ra.omse == pytest.approx(float(np.sum(ra.mse)), rel=1e-12)
        assert np.all(ra.mse >= 0)


def test_true_mean_center():
    reps = bench(_cfg(), schemes=["sir"], use_true_mean=True)
    est = reps[0].estimates
    np.testing.assert_allclose(reps[0].mse, np.mean((est - 0.4) ** 2, axis=0))
    assert reps[0].center == "true-mean"
    # t with one degree of freedom has no mean to centre on
    with pytest.raises(ValueError):
        bench(ExperimentConfig("t(1,0,1)", "cauchy(0,1)", 50, 5, 2), use_true_mean=True)


def test_unbiased_at_symmetric_target():
    d = parse_distribution("norm(0,1)")

    class NormalProposal:
        dim = 1
        log_density = staticmethod(d.log_density)

        def draw(self, stream, size):
            return stream.normals((size, 1))

    cfg = ExperimentConfig(d, NormalProposal(), N=1000, n=1000, K=200, seed=5)
    est = run_replications(cfg)
    # plain resampling from an equally weighted pool adds its own variance on
    # top of the pool's, giving sd 1/sqrt(n) + 1/sqrt(N) per replicate at most
    bound = 3 * np.sqrt(2.0) / np.sqrt(200 * 1000)
    assert abs(est.mean()) <= bound


def test_replicate_errors_carry_index():
    class Disjoint:
        dim = 1

        def log_density(self, x):
            return np.full(len(x), -np.inf)

    cfg = ExperimentConfig(Disjoint(), parse_distribution("unif(0,1)"), 10, 5, 3, seed=1)
    with pytest.raises(ReplicateError, match="replicate 0"):
        run_replications(cfg)
