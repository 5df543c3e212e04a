import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from logitsbm.design import (build_design, build_unreduced_design, check_identifiability,
                             numeric_rank, verify_column_dependencies)
from logitsbm.graph import Graph
from oracles import design_rows, exact_rank


def test_small_design_layout():
    d = build_design(4, [1, 1, 2, 2])
    assert d.X.shape == (6, 5)
    assert d.gamma_cols == [(1, 2)]
    assert list(d.eta_cols) == [1, 2, 3, 4]
    # pairs in lexicographic order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
    row = d.X[1]
    assert row.tolist() == [1, 1, 0, 1, 0]
    assert d.X[:, 0].tolist() == [0, 1, 1, 1, 1, 0]
    assert (d.X[:, 1:].sum(axis=1) == 2).all()


def test_design_matches_row_oracle():
    sigma = [1, 3, 2, 1, 3, 2, 2]
    assert build_design(7, sigma, 3).X.astype(int).tolist() == design_rows(sigma, 3)


def test_design_accepts_graph():
    g = Graph.from_edges(5, [(0, 1)])
    assert build_design(g, [1, 1, 2, 2, 2]).X.shape == (10, 6)


def test_degenerate_labels_rejected():
    with pytest.raises(ValueError, match="K >= 2"):
        build_design(4, [1, 1, 1, 1])
    with pytest.raises(ValueError, match="length"):
        build_design(5, [1, 1, 2, 2])


def test_rank_examples():
    X = build_design(5, [1, 1, 2, 2, 2]).X
    assert numeric_rank(X) == 6 == np.linalg.matrix_rank(X)
    X = build_design(4, [1, 1, 1, 2]).X
    assert numeric_rank(X) < X.shape[1]


def test_identifiability_examples():
    assert check_identifiability([1, 1, 2, 2])
    res = check_identifiability([1, 1, 1, 2])
    assert not res and res.community == 2
    assert not check_identifiability([1, 2])
    assert check_identifiability([1, 1, 3, 3], K=3).community == 2


def test_column_dependencies_examples():
    assert verify_column_dependencies(4, [1, 1, 2, 2]).tolist() == [0, 0]
    assert verify_column_dependencies(6, [1, 2, 3, 1, 2, 3]).tolist() == [0, 0, 0]


def test_unreduced_rank_deficit():
    # K dependent columns: rank of [B | C] is at most (#cols - K)
    X, cols = build_unreduced_design(6, [1, 2, 3, 1, 2, 3])
    assert X.shape[1] == len(cols) + 6
    assert numeric_rank(X) <= X.shape[1] - 3


@given(st.integers(3, 8).flatmap(lambda n: st.lists(st.integers(1, 3), min_size=n, max_size=n)))
def test_dependencies_vanish(sigma):
    if len(set(sigma)) < 2:
        return
    assert np.all(verify_column_dependencies(len(sigma), sigma, 3) == 0)


@pytest.mark.parametrize("n,K", [(4, 2), (5, 2), (5, 3), (6, 3)])
def test_rank_iff_sizes(n, K):
    for sigma in itertools.product(range(1, K + 1), repeat=n):
        if len(set(sigma)) < 2:
            continue
        X = build_design(n, sigma, K).X
        full = exact_rank(design_rows(sigma, K)) == X.shape[1]
        assert numeric_rank(X) == exact_rank(design_rows(sigma, K))
        assert full == bool(check_identifiability(sigma, K))


def test_simple_sbm_limit(rng):
    """Without node effects the design likelihood is the blockmodel likelihood."""
    for _ in range(20):
        n = int(rng.integers(3, 7))
        sigma = rng.integers(1, 3, n)
        if len(set(sigma)) < 2:
            continue
        a = rng.integers(0, 2, n * (n - 1) // 2)
        X, cols = build_unreduced_design(n, sigma, 2)
        gamma = rng.normal(size=len(cols))
        s = X[:, :len(cols)] @ gamma
        ll_design = np.sum(a * s - np.logaddexp(0, s))
        theta = {c: 1 / (1 + np.exp(-g)) for c, g in zip(cols, gamma)}
        ll_sbm = 0.0
        for p, (i, j) in enumerate(itertools.combinations(range(n), 2)):
            t = theta[tuple(sorted((sigma[i], sigma[j])))]
            ll_sbm += np.log(t) if a[p] else np.log1p(-t)
        assert ll_design == pytest.approx(ll_sbm, abs=1e-10)
