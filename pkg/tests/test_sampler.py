import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from convexchains import sampler as sp
from convexchains.enumeration import brute_force_count, enumerate_configurations
from convexchains.lattice import ConvexChain, PrimitiveVector, config_to_chain
from convexchains.partition import cumulant, mean_total


def test_geometric_marginals():
    beta = 0.4
    vs = sp.VectorSet.from_vectors([PrimitiveVector(1, 0), PrimitiveVector(2, 3)])
    K = sp.draw_multiplicities(beta, vs, 200_000, np.random.default_rng(7))
    assert K.dtype == np.float64 and np.all(K == np.floor(K)) and K.min() >= 0
    for j, w in enumerate((1, 5)):
        q = math.exp(-beta * w)
        assert abs(K[:, j].mean() - q / (1 - q)) < 5 * math.sqrt(q / (1 - q) ** 2 / 200_000)
        for k in range(3):
            p = (1 - q) * q**k
            assert abs(np.mean(K[:, j] == k) - p) < 5 * math.sqrt(p * (1 - p) / 200_000)


def test_sample_config_reproducible_and_within_cutoff():
    a = sp.sample_config(0.2, 99)
    b = sp.sample_config(0.2, 99)
    assert a == b
    assert all(0.2 * v.weight <= sp.DEFAULT_CUTOFF for v in a.support)
    config_to_chain(a)  # always a valid chain


def test_truncation_tv_bound():
    beta, cutoff = 0.5, 10.0
    L = sp.cutoff_level(beta, cutoff)
    direct = sum(m * math.exp(-beta * m) for m in range(L + 1, L + 2000))
    assert sp.truncation_tv_bound(beta, cutoff) == pytest.approx(direct, rel=1e-10)
    assert sp.truncation_tv_bound(0.01) < 1e-14


def test_endpoint_stats_match_model():
    beta = 0.3
    st = sp.endpoint_stats(beta, 50_000, 1)
    var = cumulant(2, 0, beta)
    assert abs(st.mean.sum() - mean_total(beta)) < 5 * math.sqrt(2 * var * 1.6 / 50_000)
    assert st.cov[0, 0] == pytest.approx(var, rel=0.05)
    assert st.cov[0, 1] == pytest.approx(cumulant(1, 1, beta), rel=0.1)
    assert st.hit_count == 0 and st.target is None


def test_endpoint_stats_independent_of_threads():
    a = sp.endpoint_stats(0.25, 5000, 42, target=(3, 3), threads=1)
    b = sp.endpoint_stats(0.25, 5000, 42, target=(3, 3), threads=3)
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.cov, b.cov)
    assert a.hit_count == b.hit_count


def test_endpoint_stats_preconditions():
    with pytest.raises(ValueError):
        sp.endpoint_stats(0.3, 999, 0)
    with pytest.raises(ValueError):
        sp.endpoint_stats(20.0, 5000, 0)


@pytest.mark.parametrize("restrict", [True, False])
def test_conditioned_sampler_is_uniform(restrict):
    n, draws = 3, 2600
    chains = {config_to_chain(c).vertices for c in enumerate_configurations(n, n)}
    assert len(chains) == brute_force_count(n, n) == 13
    run = sp.sample_conditioned_many(n, draws, 10**8, 5, restrict_to_box=restrict)
    freq = Counter(c.vertices for c in run.chains)
    assert set(freq) == chains
    assert stats.chisquare([freq[c] for c in chains]).pvalue > 1e-3


def test_conditioned_sampler_reproducible():
    a = sp.sample_conditioned(12, 10**7, 3)
    b = sp.sample_conditioned(12, 10**7, 3)
    assert a == b and a.endpoint == (12, 12)


def test_conditioned_sampler_exhaustion():
    with pytest.raises(sp.SamplerExhausted) as e:
        sp.sample_conditioned_many(150, 5, 500, 0)
    assert e.value.draws == 500
    assert e.value.expected_rate == pytest.approx(sp.expected_acceptance_rate(150))
    assert "500" in str(e.value)
    with pytest.raises(ValueError):
        sp.sample_conditioned(201, 10, 0)


def test_limit_curve():
    x = np.linspace(0, 1, 101)
    y = sp.limit_curve(x)
    assert y[0] == 0 and y[-1] == pytest.approx(1)
    assert np.allclose(np.sqrt(1 - x) + np.sqrt(y), 1)
    assert np.all(np.diff(y) > 0) and np.all(np.diff(y, 2) > 0)  # increasing and convex


def test_limit_shape_deviation():
    corner = ConvexChain(((0, 0), (5, 0), (5, 5)))
    assert sp.limit_shape_deviation(corner) == pytest.approx(1.0)
    diag = ConvexChain(((0, 0), (4, 4)))
    assert sp.limit_shape_deviation(diag) == 0.0  # only the endpoints are compared
    with pytest.raises(ValueError):
        sp.limit_shape_deviation(ConvexChain(((0, 0), (2, 1))))


def test_chain_exports(tmp_path):
    chain = ConvexChain(((0, 0), (2, 0), (3, 1), (3, 3)))
    sp.write_chain_csv(chain, tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text().splitlines() == ["x,y", "0,0", "2,0", "3,1", "3,3"]
    sp.write_chain_svg(chain, tmp_path / "c.svg")
    svg = (tmp_path / "c.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 2
    assert "1000.000,0.000" in svg  # endpoint maps to the top-right corner


def draws_on(vectors, beta, count, seed):
    vs = sp.VectorSet.from_vectors([PrimitiveVector(*v) for v in vectors])
    return sp.draw_multiplicities(beta, vs, count, np.random.default_rng(seed))


def test_zero_frequency_and_mean():
    K = draws_on([(1, 1)], 1.0, 100_000, 11)[:, 0]
    p0 = 1 - math.exp(-2)
    assert abs(np.mean(K == 0) - p0) <= 3 * math.sqrt(p0 * (1 - p0) / 100_000)
    K = draws_on([(1, 0)], 0.5, 100_000, 12)[:, 0]
    q = math.exp(-0.5)
    assert abs(K.mean() - q / (1 - q)) <= 3 * math.sqrt(q / (1 - q) ** 2 / 100_000)


def test_large_beta_mostly_empty():
    beta = 10.0
    vs = sp.VectorSet.below_level(sp.cutoff_level(beta))
    K = sp.draw_multiplicities(beta, vs, 20_000, np.random.default_rng(0))
    assert np.mean(K.sum(axis=1) == 0) >= 0.99


def test_endpoint_identity():
    rng = np.random.default_rng(4)
    for _ in range(200):
        cfg = sp.sample_config(0.15, rng)
        assert config_to_chain(cfg).endpoint == cfg.endpoint


@pytest.mark.slow
def test_endpoint_moments_at_n30():
    from convexchains.partition import calibrate, variance_total

    beta = calibrate(30).beta
    st = sp.endpoint_stats(beta, 100_000, 77)
    var_total = st.cov.sum()
    assert abs(var_total / variance_total(beta) - 1) < 0.1
    assert 0.4 <= st.cov[0, 1] / st.cov[0, 0] <= 0.6
    assert abs(st.mean[0] - 30) <= 3 * math.sqrt(st.cov[0, 0] / 100_000)


@pytest.mark.parametrize("n", [5, 10])
def test_hit_frequency_matches_exact_law(n):
    from convexchains.checks import exact_hit_probability
    from convexchains.partition import calibrate

    beta = calibrate(n).beta
    st = sp.endpoint_stats(beta, 100_000, 100 + n, target=(n, n))
    p = exact_hit_probability(n, beta)
    assert abs(st.hit_count - 100_000 * p) <= 3 * math.sqrt(100_000 * p * (1 - p))


def test_hit_frequency_near_local_limit_at_30():
    from convexchains.partition import calibrate

    st = sp.endpoint_stats(calibrate(30).beta, 100_000, 31, target=(30, 30))
    assert abs(st.hit_frequency / sp.expected_acceptance_rate(30) - 1) < 0.3


def test_conditioned_first_segment_distribution_at_10():
    n, count = 10, 4000
    cfgs = list(enumerate_configurations(n, n))
    first = Counter(config_to_chain(c).segments[0] for c in cfgs)
    run = sp.sample_conditioned_many(n, count, 10**8, 21)
    seen = Counter(c.segments[0] for c in run.chains)
    keys = sorted(first, key=lambda k: -first[k])
    big = [k for k in keys if first[k] / len(cfgs) * count >= 5]
    rest = [k for k in keys if k not in big]
    obs = [seen[k] for k in big] + [sum(seen[k] for k in rest)]
    exp = [first[k] / len(cfgs) * count for k in big] + [sum(first[k] for k in rest) / len(cfgs) * count]
    assert sum(seen.values()) == count and set(seen) <= set(first)
    assert stats.chisquare(obs, exp).pvalue > 1e-3
