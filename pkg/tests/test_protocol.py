"""Outcome law, explicit state vectors, sampling, failure probabilities."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from ghrlab.bitkit import BitString, Rng, random_bitstring
from ghrlab.protocol import (
    OutcomeDistribution,
    estimate_success,
    exact_success_probability,
    failure_probability_exact,
    outcome_distribution,
    phi_vector,
    repetition_failure_probability,
    run_protocol,
    run_protocol_trep,
    u_vector,
)
from ghrlab.relation import TransformIndex, answer_length, delta_table, enumerate_pairs


def bs(text):
    return BitString.from_text(text)


def all_indices(n):
    logn = answer_length(n)
    for j in range(1, n + 1):
        for sv in range(n):
            yield TransformIndex(j, BitString(sv, logn))


def test_phi_vector_unit_norm_and_signs():
    v = phi_vector(bs("0110"))
    assert v.dim == 4
    assert v.norm() == pytest.approx(1.0)
    assert np.allclose(np.asarray(v.amplitudes) * 2.0, [1, -1, -1, 1])


def test_u_vectors_orthonormal_n4():
    us = [np.asarray(u_vector(t, 4).amplitudes) for t in all_indices(4)]
    gram = np.array([[a @ b for b in us] for a in us])
    assert np.abs(gram - np.eye(16)).max() < 1e-12


def test_closed_form_equals_squared_inner_products_n4():
    us = {t: np.asarray(u_vector(t, 4).amplitudes) for t in all_indices(4)}
    for x, y in enumerate_pairs(4):
        dist = outcome_distribution(x, y, mode="float")
        joint = np.kron(np.asarray(phi_vector(x).amplitudes),
                        np.asarray(phi_vector(y).amplitudes))
        for t, u in us.items():
            ip = float(u @ joint)
            assert abs(ip * ip - dist.probability(t.j, t.s)) < 1e-12


def test_distribution_structure():
    d = outcome_distribution(bs("0000"), bs("1100"))
    assert d.denominator == 64
    assert d.total_mass() == 1
    assert d.max_probability() <= Fraction(1, 4)
    assert d.probability(4, bs("10")) == Fraction(16, 64)
    assert d.probability(2, bs("10")) == Fraction(16, 64)
    assert d.probability(1, bs("00")) == 0
    assert d.in_window_mass() == 0


def test_mode_defaults_by_size():
    assert outcome_distribution(bs("0000"), bs("1100")).mode == "rational"
    x = random_bitstring(1024, Rng(0))
    y = random_bitstring(1024, Rng(1))
    d = outcome_distribution(x, y)
    assert d.mode == "float"
    assert isinstance(d.probability(1, BitString(0, 10)), float)
    # rational arithmetic stays available on request
    dr = outcome_distribution(x, y, mode="rational")
    assert dr.total_mass() == 1


def test_max_probability_never_exceeds_one_over_n():
    rng = Rng(4)
    for n in (4, 16, 64):
        for _ in range(5):
            d = outcome_distribution(random_bitstring(n, rng), random_bitstring(n, rng),
                                     mode="rational")
            assert d.max_probability() <= Fraction(1, n)


def test_sampling_matches_exact_law():
    """Chi-square of 20000 draws against the exact cell masses at n=4."""
    x, y = bs("0100"), bs("1110")
    d = outcome_distribution(x, y)
    cells = list(all_indices(4))
    probs = np.array([float(d.probability(t.j, t.s)) for t in cells])
    draws = d.sample(Rng(17), 20000)
    counts = np.zeros(len(cells), dtype=int)
    index = {t: i for i, t in enumerate(cells)}
    for t in draws:
        counts[index[t]] += 1
    keep = probs > 0
    assert counts[~keep].sum() == 0
    chi2 = (((counts[keep] - 20000 * probs[keep]) ** 2) / (20000 * probs[keep])).sum()
    dof = keep.sum() - 1
    assert chi2 < stats.chi2.ppf(0.999, dof)


def test_sampling_deterministic():
    d = outcome_distribution(bs("0100"), bs("1110"))
    assert d.sample(Rng(5), 12) == d.sample(Rng(5), 12)


def test_run_protocol_shapes():
    x, y = bs("0000"), bs("1100")
    answer = run_protocol(x, y, Rng(1))
    assert len(answer) == 2
    assert all(1 <= t.j <= 4 and len(t.s) == 2 for t in answer)


def test_trep_tiling_pattern():
    x = random_bitstring(16, Rng(2))
    y = random_bitstring(16, Rng(3))
    base = outcome_distribution(x, y).sample(Rng(9), 3)
    tiled = run_protocol_trep(x, y, 3, Rng(9))
    assert tiled == (base + base)[:4]
    full = run_protocol_trep(x, y, 4, Rng(9))
    assert full == outcome_distribution(x, y).sample(Rng(9), 4)
    with pytest.raises(ValueError):
        run_protocol_trep(x, y, 0, Rng(1))


def test_repetition_failure_closed_cases():
    assert repetition_failure_probability(2, Fraction(0)) == 0
    assert repetition_failure_probability(2, Fraction(1)) == 1
    assert repetition_failure_probability(2, Fraction(1, 2)) == Fraction(1, 4)
    # odd m: strictly more than half of 3 means at least 2
    assert repetition_failure_probability(3, Fraction(1, 2)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        repetition_failure_probability(2, Fraction(3, 2))


def test_failure_probability_exact_n4_values():
    # typical n=4 pairs have zero in-window mass, atypical pairs never fail
    for x, y in enumerate_pairs(4):
        assert failure_probability_exact(x, y) == 0
    assert exact_success_probability(4) == 1


def test_failure_probability_positive_case():
    """A larger pair with nonzero in-window mass fails with p_in**window share."""
    rng = Rng(21)
    found = False
    for _ in range(40):
        x = random_bitstring(16, rng)
        y = random_bitstring(16, rng)
        table = delta_table(x, y)
        if not table.aleph():
            continue
        d = OutcomeDistribution.from_table(table)
        p = d.in_window_mass()
        if p == 0:
            continue
        found = True
        expect = repetition_failure_probability(4, p)
        assert failure_probability_exact(x, y) == expect
        assert 0 < expect < 1
    assert found


def test_estimate_success_deterministic_and_thread_invariant(monkeypatch):
    a = estimate_success(16, 40, Rng(6))
    b = estimate_success(16, 40, Rng(6))
    assert a == b
    monkeypatch.setenv("GHRLAB_THREADS", "3")
    c = estimate_success(16, 40, Rng(6))
    assert a == c


def test_estimate_success_trep_matches_full_when_t_is_logn():
    a = estimate_success(16, 30, Rng(7))
    b = estimate_success(16, 30, Rng(7), t=answer_length(16))
    assert a == b
