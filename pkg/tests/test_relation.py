"""Distance tables, window/typicality predicates, relation checkers."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghrlab.bitkit import BitString, Rng, random_bitstring
from ghrlab.relation import (
    McEstimate,
    TransformIndex,
    aleph,
    aleph_statistic,
    answer_length,
    delta,
    delta_table,
    enumerate_pairs,
    estimate_aleph_probability,
    exact_aleph_probability,
    ghd_value,
    ghr_is_valid,
    require_transform_size,
    tghr_is_valid,
)


def bs(text):
    return BitString.from_text(text)


def test_transform_size_gate():
    for n in (4, 16, 64, 256, 1024):
        require_transform_size(n)
    for n in (1, 2, 8, 32, 100, 128, 512):
        with pytest.raises(ValueError):
            require_transform_size(n)


def test_answer_length():
    assert answer_length(4) == 2
    assert answer_length(256) == 8
    assert answer_length(1024) == 10


def test_delta_worked_rows():
    x, y = bs("0000"), bs("1100")
    assert [delta(x, y, TransformIndex(j, bs("10"))) for j in (1, 2, 3, 4)] == [2, 0, 2, 4]
    assert [delta(x, y, TransformIndex(j, bs("11"))) for j in (1, 2, 3, 4)] == [4, 2, 0, 2]
    assert [delta(x, y, TransformIndex(j, bs("00"))) for j in (1, 2, 3, 4)] == [2, 2, 2, 2]


def test_delta_identity_shift_no_pattern():
    # j = n with the zero selector leaves x untouched
    x, y = bs("0110"), bs("1110")
    assert delta(x, y, TransformIndex(4, bs("00"))) == (x ^ y).weight()


def test_table_matches_pointwise_and_backends_agree():
    rng = Rng(12)
    for n in (4, 16):
        for _ in range(8):
            x = random_bitstring(n, rng)
            y = random_bitstring(n, rng)
            fast = delta_table(x, y)
            slow = delta_table(x, y, backend="naive")
            assert np.array_equal(fast.values, slow.values)
            logn = answer_length(n)
            for j in (1, n // 2, n):
                for sv in (0, 1, n - 1):
                    s = BitString(sv, logn)
                    assert fast.entry(j, s) == delta(x, y, TransformIndex(j, s))


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        delta_table(bs("0000"), bs("0000"), backend="quantum")


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([4, 16, 64]), st.data())
def test_parseval_property(n, data):
    xv = data.draw(st.integers(0, 2**n - 1))
    yv = data.draw(st.integers(0, 2**n - 1))
    table = delta_table(BitString(xv, n), BitString(yv, n))
    assert table.parseval_sum() == n**3


def test_window_mask_is_squared_deviation_test():
    table = delta_table(bs("0000"), bs("1100"))
    dev = table.scaled_deviations()
    assert np.array_equal(table.window_mask(), dev * dev <= 4)


def test_aleph_examples_at_n4():
    # at n=4 typicality is exactly even xor distance
    for x, y in enumerate_pairs(4):
        assert aleph(x, y) == ((x ^ y).weight() % 2 == 0)


def test_aleph_statistic_consistency():
    rng = Rng(3)
    for _ in range(10):
        x = random_bitstring(16, rng)
        y = random_bitstring(16, rng)
        table = delta_table(x, y)
        dev = table.scaled_deviations()
        s4 = int((dev[table.window_mask()] ** 2).sum())
        assert aleph_statistic(x, y) == s4
        assert aleph(x, y) == (9 * s4 <= 4 * 16**3)


def test_ghr_valid_counts_outside_entries():
    x, y = bs("0000"), bs("1100")
    # s=10 column: j=4 has delta 4 (deviation 4, outside), j=2 has delta 0 (outside)
    outside = [TransformIndex(4, bs("10")), TransformIndex(2, bs("10"))]
    inside = [TransformIndex(1, bs("00")), TransformIndex(2, bs("00"))]
    assert ghr_is_valid(x, y, outside)
    assert ghr_is_valid(x, y, [outside[0], inside[0]])  # half outside is enough
    assert not ghr_is_valid(x, y, inside)


def test_ghr_vacuous_when_atypical():
    x, y = bs("0000"), bs("1000")
    assert not aleph(x, y)
    anything = [TransformIndex(1, bs("00")), TransformIndex(1, bs("00"))]
    assert ghr_is_valid(x, y, anything)


def test_ghr_answer_length_enforced():
    x, y = bs("0000"), bs("1100")
    with pytest.raises(ValueError):
        ghr_is_valid(x, y, [TransformIndex(1, bs("00"))])


def test_tghr_threshold_is_exact():
    n = 16
    x = BitString.zeros(n)
    y = BitString.zeros(n)
    # distance d valid iff d <= n/2 - sqrt(n) = 4
    for d in range(n + 1):
        tau = BitString((1 << d) - 1, n)
        assert tghr_is_valid(x, y, tau) == (d <= 4)


def test_tghr_non_square_threshold():
    n = 6  # n/2 - sqrt(n) = 0.551..., so only distance 0 passes
    x = BitString.zeros(n)
    for d in range(n + 1):
        tau = BitString((1 << d) - 1, n)
        assert tghr_is_valid(x, BitString.zeros(n), tau) == (d == 0)


def test_ghd_value_three_zones():
    n, d = 8, 2
    x = BitString.zeros(n)
    weights = {0: 0, 2: 0, 3: None, 4: None, 5: None, 6: 1, 8: 1}
    for w, expect in weights.items():
        y = BitString((1 << w) - 1, n)
        assert ghd_value(x, y, d) == expect


def test_exact_aleph_probability_small():
    assert exact_aleph_probability(4) == Fraction(1, 2)
    with pytest.raises(ValueError):
        exact_aleph_probability(64)


def test_estimate_aleph_probability_deterministic():
    a = estimate_aleph_probability(16, 60, Rng(2))
    b = estimate_aleph_probability(16, 60, Rng(2))
    assert a == b
    assert a.trials == 60
    assert 0.0 <= a.mean <= 1.0


def test_estimate_thread_invariance(monkeypatch):
    monkeypatch.setenv("GHRLAB_THREADS", "4")
    a = estimate_aleph_probability(16, 40, Rng(8))
    monkeypatch.setenv("GHRLAB_THREADS", "1")
    b = estimate_aleph_probability(16, 40, Rng(8))
    assert a == b


def test_mc_estimate_stderr():
    est = McEstimate.from_successes(30, 120, seed=0)
    assert est.mean == 0.25
    assert est.stderr == pytest.approx((0.25 * 0.75 / 120) ** 0.5)
    with pytest.raises(ValueError):
        McEstimate.from_successes(5, 0, seed=0)
