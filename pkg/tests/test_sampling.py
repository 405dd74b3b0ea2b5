from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from learnsupport._kernels import get_backend
from learnsupport.distributions import Distribution, FormatError, power_sum, zipf_distribution
from learnsupport.sampling import (AliasSampler, SampleCounts, build_alias_sampler, derive_seed,
                                   draw_fixed, draw_poissonized, load_counts, make_rng,
                                   poisson_variates, save_counts)


def test_alias_uniform_frequencies():
    d = zipf_distribution(4, 0.0)
    N = 10 ** 6
    s = draw_fixed(d, N, make_rng(1))
    assert s.total == N
    sigma = math.sqrt(N * 0.25 * 0.75)
    assert np.all(np.abs(s.counts - N / 4) <= 4 * sigma)


def test_alias_single_element():
    d = Distribution(1, [42], [1.0])
    s = draw_fixed(d, 1000, make_rng(0))
    assert s.as_dict() == {42: 1000}


def test_alias_zipf_mean_probability():
    d = zipf_distribution(10 ** 5, 0.5)
    N = 10 ** 6
    s = draw_fixed(d, N, make_rng(2))
    p = d.prob_of(s.ids)
    mean = math.fsum(p * s.counts) / N
    m2 = power_sum(d, 2)
    sd = math.sqrt((power_sum(d, 3) - m2 ** 2) / N)
    assert abs(mean - m2) <= 4 * sd


def test_draw_fixed_edge_cases():
    d = zipf_distribution(10, 1.0)
    assert draw_fixed(d, 0, make_rng(0)).distinct == 0
    one = draw_fixed(d, 1, make_rng(0))
    assert one.total == 1 and one.distinct == 1
    with pytest.raises(ValueError):
        draw_fixed(d, -1, make_rng(0))


def test_draw_fixed_deterministic():
    d = zipf_distribution(1000, 0.7)
    a = draw_fixed(d, 5000, make_rng(9, 3))
    b = draw_fixed(build_alias_sampler(d), 5000, make_rng(9, 3))
    c = draw_fixed(d, 5000, make_rng(9, 4))
    assert a == b
    assert a != c


def test_draw_fixed_marginals():
    d = Distribution(10, [0, 1, 2], [0.5, 0.3, 0.2])
    sampler = AliasSampler(d)
    N, T = 200, 4000
    rng = make_rng(5)
    x = np.array([sampler.dense_counts(N, rng) for _ in range(T)])
    for q, p in enumerate(d.probs):
        mean, var = N * p, N * p * (1 - p)
        assert abs(x[:, q].mean() - mean) <= 4 * math.sqrt(var / T)
        # variance of the sample variance for a near-normal variate
        assert abs(x[:, q].var() - var) <= 4 * var * math.sqrt(2 / T)


def test_poissonized_examples():
    d = Distribution(1, [0], [1.0])
    assert draw_poissonized(d, 0.0, make_rng(0)).distinct == 0
    T = 10 ** 5
    rng = make_rng(11)
    totals = poisson_variates(np.full(T, 5.0), rng)
    assert abs(totals.mean() - 5) <= 4 * math.sqrt(5 / T)
    assert draw_poissonized(d, 5.0, make_rng(0)).rate == 5.0


def test_poissonized_independence():
    d = Distribution(2, [0, 1], [0.5, 0.5])
    rng = make_rng(12)
    T = 10 ** 5
    x = np.zeros((T, 2))
    for t in range(T):
        s = draw_poissonized(d, 10.0, rng)
        x[t, s.ids] = s.counts
    r = np.corrcoef(x[:, 0], x[:, 1])[0, 1]
    assert abs(r) < 0.02
    assert abs(x.mean() - 5) <= 4 * math.sqrt(5 / (2 * T))


@pytest.mark.parametrize("mu", [0.001, 0.7, 3.0, 9.99, 10.0, 37.5, 1000.0])
def test_poisson_variates_distribution(mu):
    T = 40000
    x = poisson_variates(np.full(T, mu), make_rng(7, int(mu * 1000)))
    assert abs(x.mean() - mu) <= 4 * math.sqrt(mu / T)
    lo, hi = stats.poisson.ppf(1e-4, mu), stats.poisson.ppf(1 - 1e-4, mu)
    cats = np.arange(int(lo), int(hi) + 1)
    if cats.size > 1:
        obs = np.array([(x == c).sum() for c in cats])
        exp = stats.poisson.pmf(cats, mu) * T
        keep = exp >= 5
        obs, exp = obs[keep], exp[keep]
        if obs.size > 1:
            chi = ((obs - exp) ** 2 / exp).sum()
            assert stats.chi2.sf(chi, obs.size - 1) > 1e-4


def test_poisson_variates_rejects_bad_means():
    with pytest.raises(ValueError):
        poisson_variates(np.array([-1.0]), make_rng(0))
    with pytest.raises(ValueError):
        draw_poissonized(zipf_distribution(3, 0.0), float("nan"), make_rng(0))
    with pytest.raises(ValueError):
        draw_poissonized(zipf_distribution(3, 0.0), 1.0, make_rng(0), method="other")


def test_mixture_method():
    d = zipf_distribution(3, 1.0)
    s = draw_poissonized(d, 6.0, make_rng(3), method="mixture")
    assert s.rate == 6.0 and s.effective_size == 6.0


def test_rng_substreams():
    a = make_rng(1, 2, 3).random(4)
    b = make_rng(1, 2, 3).random(4)
    c = make_rng(1, 2, 4).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    s = derive_seed(1, 2, 3)
    assert 0 <= s < 2 ** 64 and s == derive_seed(1, 2, 3) and s != derive_seed(1, 3, 2)


def test_counts_file_round_trip(tmp_path):
    s = draw_fixed(zipf_distribution(500, 0.5), 2000, make_rng(0))
    path = tmp_path / "c.csv"
    save_counts(s, path)
    assert path.read_text().startswith("id,count\n")
    assert load_counts(path) == s
    path.write_text("id,count\n1,0\n")
    with pytest.raises(FormatError, match=":2:"):
        load_counts(path)


def test_sample_counts_validation():
    with pytest.raises(ValueError):
        SampleCounts(np.array([1]), np.array([0]))
    s = SampleCounts.from_mapping({3: 2, 4: 0, 5: 1})
    assert s.total == 3 and s.distinct == 2 and s.effective_size == 3.0


# -- backend equivalence ------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=300))
def test_alias_tables_agree_across_backends(weights):
    w = np.array(weights)
    p = w / w.sum()
    t0, a0 = get_backend("numpy").alias_build(p)
    t1, a1 = get_backend("numba").alias_build(p)
    np.testing.assert_array_equal(a0, a1)
    np.testing.assert_array_equal(t0, t1)
    # the table reproduces the distribution exactly (up to rounding)
    m = p.size
    implied = t0 / m
    np.add.at(implied, a0, (1 - t0) / m)
    np.testing.assert_allclose(implied, p, atol=1e-12)


def test_sampling_kernels_agree_across_backends():
    np_b, nb_b = get_backend("numpy"), get_backend("numba")
    d = zipf_distribution(2000, 0.8)
    t, a = np_b.alias_build(np.array(d.probs))
    rng = make_rng(4)
    cols = rng.integers(0, t.size, size=50000)
    u = rng.random(50000)
    np.testing.assert_array_equal(np_b.alias_counts(t, a, cols, u, t.size),
                                  nb_b.alias_counts(t, a, cols, u, t.size))
    mu = make_rng(5).random(5000) * 9.9
    u = make_rng(6).random(5000)
    np.testing.assert_array_equal(np_b.poisson_inversion(mu, np.exp(-mu), u),
                                  nb_b.poisson_inversion(mu, np.exp(-mu), u))
    big = 10 + make_rng(7).random(3000) * 1e4
    np.testing.assert_array_equal(np_b.poisson_ptrs(big, make_rng(8)),
                                  nb_b.poisson_ptrs(big, make_rng(8)))
