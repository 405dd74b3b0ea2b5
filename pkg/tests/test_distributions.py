from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from learnsupport.distributions import (Distribution, FormatError, build_hard_instance,
                                        empirical_distribution, integral_modulus, lcm_modulus,
                                        load_distribution, load_token_counts, lower_bound_coeffs,
                                        lower_bound_eps, power_sum, round_to_multiple,
                                        save_distribution, support_size, zipf_distribution)


def test_zipf_uniform_small():
    d = zipf_distribution(4, 0.0)
    assert d.n == 4 and d.support_size == 4
    np.testing.assert_array_equal(d.probs, [0.25] * 4)


def test_zipf_two_elements():
    d = zipf_distribution(2, 0.5)
    assert d.probs[0] == pytest.approx(1 / (1 + 2 ** -0.5), rel=1e-15)
    assert d.probs[0] == pytest.approx(0.585786, abs=1e-6)
    assert d.probs[1] == pytest.approx(0.414214, abs=1e-6)


def test_zipf_benchmark_size():
    d = zipf_distribution(10 ** 5, 0.5)
    assert d.support_size == 10 ** 5
    assert 1.9e5 < d.n < 2.1e5
    assert d.probs.min() >= 1 / d.n
    assert d.probs.min() < 1 / (d.n - 1)


def test_empirical_distribution():
    d = empirical_distribution({7: 3, 9: 1})
    assert d.n == 4
    assert d.as_dict() == {7: 0.75, 9: 0.25}
    d = empirical_distribution({0: 1, 1: 1})
    assert d.n == 2 and d.as_dict() == {0: 0.5, 1: 0.5}
    with pytest.raises(ValueError):
        empirical_distribution({})


def test_distribution_validation():
    with pytest.raises(ValueError):
        Distribution(4, [0, 1], [0.5, 0.4])
    with pytest.raises(ValueError):
        Distribution(2, [0, 1, 2], [0.5, 0.25, 0.25])   # below 1/n
    with pytest.raises(ValueError):
        Distribution(4, [0, 0], [0.5, 0.5])
    with pytest.raises(ValueError):
        Distribution(4, [0, 1], [1.0, 0.0])


def test_prob_of_and_support_size():
    d = zipf_distribution(4, 0.0)
    assert support_size(d) == 4
    np.testing.assert_array_equal(d.prob_of([2, 4]), [0.25, 0.25])
    with pytest.raises(KeyError):
        d.prob_of([5])


def test_power_sum_examples():
    d = zipf_distribution(50, 0.0)
    assert power_sum(d, 1) == pytest.approx(1.0, abs=1e-15)
    assert power_sum(d, 2) == pytest.approx(1 / 50, rel=1e-14)
    with pytest.raises(ValueError):
        power_sum(d, 0)


def test_lower_bound_coeffs_closed_form():
    for k in range(1, 13):
        a = lower_bound_coeffs(k)
        ref = [Fraction((-1) ** i * math.comb(k, i), 2 ** (k - 1) * (k + i)) for i in range(k + 1)]
        assert list(a) == ref
        assert sum(a) == lower_bound_eps(k)
        assert lower_bound_eps(k) == Fraction(1, k * 2 ** (k - 1) * math.comb(2 * k, k))
        for r in range(1, k + 1):
            assert sum(ai * (k + i) ** r for i, ai in enumerate(a)) == 0


def test_hard_instance_k1():
    pair = build_hard_instance(1, 1200)
    assert [float(x) for x in pair.coeffs] == [1.0, -0.5]
    assert pair.eps == 0.5
    assert pair.P.support_size == 1200 and np.all(pair.P.probs == 1 / 1200)
    assert pair.Q.support_size == 600 and np.all(pair.Q.probs == 2 / 1200)
    assert pair.P.support_size - pair.Q.support_size == 600
    for d in (pair.P, pair.Q):
        assert math.fsum(d.probs) == pytest.approx(1.0, abs=1e-12)


def test_hard_instance_k2_matches_second_moment():
    pair = build_hard_instance(2, integral_modulus(2) * 100)
    assert power_sum(pair.P, 2) == pytest.approx(power_sum(pair.Q, 2), rel=1e-9)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_hard_instance_moments_with_rounding(k):
    # n that is not a multiple of anything in particular: rounding repair kicks in
    n = 10 ** 5 + 7
    pair = build_hard_instance(k, n)
    for d in (pair.P, pair.Q):
        assert math.fsum(d.probs) == pytest.approx(1.0, abs=1e-9)
        assert d.probs.min() >= 1 / n - 1e-12
    gap_pre = pair.main_support[0] - pair.main_support[1]
    assert abs(gap_pre - pair.eps * n) <= k + 1
    gap = pair.P.support_size - pair.Q.support_size
    assert abs(gap - pair.eps * n) <= k * k + 1


def test_hard_instance_masses_in_range():
    k = 4
    pair = build_hard_instance(k, integral_modulus(k) * 7)
    for d in (pair.P, pair.Q):
        units = np.rint(d.probs * pair.n).astype(int)
        assert set(np.unique(units)) <= set(range(k, 2 * k + 1)) | {1}


def test_hard_instance_range_checks():
    with pytest.raises(ValueError):
        build_hard_instance(0, 1000)
    with pytest.raises(ValueError):
        build_hard_instance(13, 10 ** 9)
    with pytest.raises(ValueError):
        build_hard_instance(3, 10 * 3 * 8 - 1)


def test_moduli():
    assert lcm_modulus(1) == 2
    assert lcm_modulus(3) == math.lcm(4, 3, 4, 5, 6)
    for k in range(1, 9):
        m = integral_modulus(k)
        assert all((a * m).denominator == 1 for a in lower_bound_coeffs(k))
    assert round_to_multiple(10 ** 6, 7) % 7 == 0
    assert abs(round_to_multiple(10 ** 6, 7) - 10 ** 6) <= 3


def test_distribution_file_round_trip(tmp_path):
    d = zipf_distribution(10 ** 5, 0.5)
    path = tmp_path / "z.csv"
    save_distribution(d, path)
    assert path.read_text().splitlines()[0] == "id,prob"
    assert load_distribution(path) == d


def test_distribution_file_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("")
    with pytest.raises(FormatError, match=":1:"):
        load_distribution(p)
    p.write_text("id,prob\n1,0.5\n2,0.4\n")
    with pytest.raises(FormatError, match="sum"):
        load_distribution(p)
    p.write_text("id,prob\n1,0.5\n2,abc\n")
    with pytest.raises(FormatError, match=":3:"):
        load_distribution(p)
    p.write_text("id,prob\n1,0.5\n1,0.5\n")
    with pytest.raises(FormatError, match=":3:"):
        load_distribution(p)


def test_distribution_file_small_renormalisation(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("id,prob\n1,0.5000004\n2,0.5\n")
    d = load_distribution(p)
    assert math.fsum(d.probs) == pytest.approx(1.0, abs=1e-12)


def test_token_counts_and_sidecar(tmp_path):
    tok = tmp_path / "day1.txt"
    tok.write_text("apple\nbanana\napple\ncherry, pie\n")
    side = tmp_path / "ids.csv"
    counts, names = load_token_counts(tok, side)
    assert counts == {0: 2, 1: 1, 2: 1}
    assert names[2] == "cherry, pie"
    assert side.read_text().splitlines()[:2] == ["id,token", "0,apple"]
    tok2 = tmp_path / "day2.txt"
    tok2.write_text("cherry, pie\ndate\n")
    counts2, _ = load_token_counts(tok2, side)
    assert counts2 == {2: 1, 3: 1}
    d = empirical_distribution(counts)
    assert d.n == 4 and d.support_size == 3


@settings(max_examples=50, deadline=None)
@given(m=st.integers(1, 2000), s=st.floats(0.0, 3.0))
def test_zipf_promise_property(m, s):
    d = zipf_distribution(m, s)
    assert abs(math.fsum(d.probs) - 1) <= 1e-9
    assert d.probs.min() >= 1 / d.n - 1e-12
    assert np.all(np.diff(d.probs) <= 0)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 6), extra=st.integers(0, 5000))
def test_hard_instance_property(k, extra):
    n = 10 * k * 2 ** k + extra
    pair = build_hard_instance(k, n)
    for d in (pair.P, pair.Q):
        assert abs(math.fsum(d.probs) - 1) <= 1e-9
        assert d.probs.min() >= 1 / n - 1e-12
    gap_pre = pair.main_support[0] - pair.main_support[1]
    assert abs(gap_pre - pair.eps * n) <= k + 1
