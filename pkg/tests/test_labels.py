from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from logitsbm.labels import (binder, binder_hamming_bound, community_sizes, complete_relabeling,
                             error_rate, gamma_pairs, hamming, ind, is_canonical, order,
                             permute_gamma, q_error_interval, remap,
                             remap_rows)
from oracles import binder_pairs, error_rate_perm, remap_loop

WORKED = [2, 2, 3, 1, 3, 4, 2, 1]

labels = st.lists(st.integers(1, 6), min_size=1, max_size=30)


def permuted(sigma, perm):
    """Apply the label permutation k -> perm[k-1]."""
    return np.asarray(perm)[np.asarray(sigma) - 1]


def test_ind_worked_example():
    assert ind(WORKED).tolist() == [4, 1, 3, 6]
    assert ind([1, 1, 1]).tolist() == [1]
    assert ind([3, 2, 1]).tolist() == [3, 2, 1]


def test_ind_skips_absent_labels():
    assert ind([3, 3, 1]).tolist() == [3, 1]


def test_order_examples():
    assert order(WORKED).tolist() == [2, 3, 1, 4]
    assert order([1, 2, 3]).tolist() == [1, 2, 3]
    assert order([3, 3, 1]).tolist() == [3, 1]


def test_remap_examples():
    canon, rho = remap(WORKED)
    assert canon.tolist() == [1, 1, 2, 3, 2, 4, 1, 3]
    assert rho[[2, 3, 1, 4]].tolist() == [1, 2, 3, 4]
    assert remap([1, 1, 2, 3, 2, 4, 1, 3])[0].tolist() == [1, 1, 2, 3, 2, 4, 1, 3]
    assert remap([2, 2, 1])[0].tolist() == [1, 1, 2]


def test_invalid_labels():
    for bad in ([], [0, 1], [1.5, 2], [[1, 2]]):
        with pytest.raises(ValueError):
            remap(bad)


@given(labels)
def test_remap_matches_loop_oracle(sigma):
    assert remap(sigma)[0].tolist() == remap_loop(sigma)


@given(st.lists(labels.filter(lambda s: len(s) == 8).map(list), min_size=1, max_size=5))
def test_remap_rows_matches_remap(rows):
    S = np.array(rows)
    assert remap_rows(S).tolist() == [remap(r)[0].tolist() for r in rows]


def test_remap_rows_errors():
    for bad in ([1, 2], [[0, 1]], np.zeros((0, 3), int)):
        with pytest.raises(ValueError):
            remap_rows(bad)


@given(labels, st.permutations(range(1, 7)))
def test_remap_properties(sigma, perm):
    canon = remap(sigma)[0]
    assert remap(canon)[0].tolist() == canon.tolist()
    assert remap(permuted(sigma, perm))[0].tolist() == canon.tolist()
    assert order(canon).tolist() == list(range(1, len(set(sigma)) + 1))
    assert is_canonical(canon)


def test_complete_relabeling_fills_absent():
    _, rho = remap([3, 3, 1])
    full = complete_relabeling(rho, 4)
    assert full[1:].tolist() == [2, 3, 1, 4]
    assert sorted(full[1:]) == [1, 2, 3, 4]


def test_permute_gamma_follows_labels():
    K = 3
    gamma = np.array([-1.0, -2.0, -3.0])  # (1,2), (1,3), (2,3)
    sigma = np.array([3, 3, 1, 2, 2, 1])
    canon, rho = remap(sigma)
    new = permute_gamma(gamma, rho, K)
    G_old = dict(zip(gamma_pairs(K), gamma))
    G_new = dict(zip(gamma_pairs(K), new))
    for i in range(len(sigma)):
        for j in range(len(sigma)):
            a, b = sorted((sigma[i], sigma[j]))
            c, d = sorted((canon[i], canon[j]))
            if a != b:
                assert G_old[(a, b)] == G_new[(c, d)]


def test_community_sizes():
    assert community_sizes([1, 3, 3], 4).tolist() == [1, 0, 2, 0]


# -- distances ---------------------------------------------------------------

def test_hamming_examples():
    assert hamming([1, 1, 2], [1, 1, 2]) == 0
    assert hamming([1, 2], [2, 1]) == 2
    assert hamming([1, 1, 2, 2], [1, 2, 1, 2]) == 2
    with pytest.raises(ValueError, match="length"):
        hamming([1, 2], [1, 2, 1])


def test_hamming_not_invariant_to_single_permutation():
    a, b = [1, 1, 2], [1, 1, 2]
    assert hamming(permuted(a, [2, 1]), b) != hamming(a, b)


@given(st.data())
def test_hamming_double_permutation(data):
    n = data.draw(st.integers(1, 20))
    a = data.draw(st.lists(st.integers(1, 4), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(1, 4), min_size=n, max_size=n))
    perm = data.draw(st.permutations(range(1, 5)))
    assert hamming(permuted(a, perm), permuted(b, perm)) == hamming(a, b)


def test_binder_examples():
    assert binder([1, 2, 2, 1], [1, 2, 2, 1]) == 0
    assert binder([1, 1, 2, 2], [1, 2, 1, 2]) == 4
    assert binder([1, 1, 2], [2, 2, 1]) == 0


@given(st.data())
def test_binder_against_pair_loop(data):
    n = data.draw(st.integers(1, 15))
    a = data.draw(st.lists(st.integers(1, 5), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(1, 5), min_size=n, max_size=n))
    p1 = data.draw(st.permutations(range(1, 6)))
    p2 = data.draw(st.permutations(range(1, 6)))
    B = binder(a, b)
    assert B == binder_pairs(a, b)
    assert binder(permuted(a, p1), permuted(b, p2)) == B


def test_bound_examples():
    B, bound = binder_hamming_bound([1, 1, 2, 2], [1, 2, 1, 2])
    assert B == 4 and bound == Fraction(6)
    assert binder_hamming_bound([1, 2, 3], [1, 2, 3]) == (0, 0)


def test_bound_random_k3(rng):
    for _ in range(2000):
        a, b = rng.integers(1, 4, 10), rng.integers(1, 4, 10)
        B, bound = binder_hamming_bound(a, b)
        assert B <= bound


# -- error rates -------------------------------------------------------------

def test_error_rate_examples():
    assert error_rate([2, 2, 1], [1, 1, 2]) == 0.0
    assert error_rate([1, 1, 2, 2], [1, 2, 1, 2]) == 0.5
    assert error_rate([1, 2, 3, 3], [1, 2, 3, 3]) == 0.0


@given(st.data())
def test_error_rate_against_permutations(data):
    n = data.draw(st.integers(1, 12))
    a = data.draw(st.lists(st.integers(1, 4), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    assert error_rate(a, b) == pytest.approx(error_rate_perm(a, b), abs=1e-15)


def test_q_interval_examples():
    assert q_error_interval([0.1] * 10, 0.1) == pytest.approx((0.1, 0.1))
    assert q_error_interval([0.3], 0.5) == (0.3, 0.3)
    lo, hi = q_error_interval(np.arange(100) / 100, 0.10)
    # type-7 position h = (N-1) p
    assert lo == pytest.approx(0.0495) and hi == pytest.approx(0.9405)


@pytest.mark.parametrize("q", [0, 1, 1.5, -0.1])
def test_q_interval_bad_q(q):
    with pytest.raises(ValueError):
        q_error_interval([0.1, 0.2], q)


def test_q_interval_empty():
    with pytest.raises(ValueError):
        q_error_interval([], 0.1)
