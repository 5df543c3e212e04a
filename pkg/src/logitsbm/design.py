"""Logistic-regression design of the node-corrected blockmodel.

Each unordered node pair ``i < j`` contributes one row ``[b_ij | c_ij]``:
``b_ij`` indicates the (ordered) pair of communities joined by the pair and
``c_ij`` marks the two endpoints.  The reduced design drops the ``K``
within-community columns, whose coefficients are pinned to zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .labels import _pair_lookup, as_labels, community_sizes, gamma_pairs

__all__ = [
    "DesignMatrix",
    "pair_index",
    "build_design",
    "build_unreduced_design",
    "check_identifiability",
    "IdentifiabilityCheck",
    "verify_column_dependencies",
    "numeric_rank",
]


def pair_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row order of the design: all ``(i, j)`` with ``i < j``, lexicographic."""
    return np.triu_indices(n, k=1)


def _size(graph) -> int:
    return graph if isinstance(graph, (int, np.integer)) else graph.n


def _validated(n, sigma, K):
    sigma = as_labels(sigma)
    if sigma.size != n:
        raise ValueError(f"label vector has length {sigma.size}, graph has {n} nodes")
    K = int(sigma.max()) if K is None else int(K)
    if sigma.max() > K:
        raise ValueError("label exceeds K")
    if K < 2 or len(np.unique(sigma)) < 2:
        raise ValueError("K >= 2 required, with at least two labels present")
    return sigma, K


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray
    rows: tuple[np.ndarray, np.ndarray]
    gamma_cols: list[tuple[int, int]]
    sigma: np.ndarray

    @property
    def n_gamma(self) -> int:
        return len(self.gamma_cols)

    @property
    def eta_cols(self) -> range:
        return range(self.n_gamma, self.X.shape[1])


def build_design(graph, sigma, K: int | None = None) -> DesignMatrix:
    """Dense reduced design: ``C(K,2)`` gamma columns then ``n`` eta columns.

    ``graph`` may be a :class:`~logitsbm.graph.Graph` or a node count.
    """
    n = _size(graph)
    sigma, K = _validated(n, sigma, K)
    ii, jj = pair_index(n)
    cols = gamma_pairs(K)
    g = len(cols)
    X = np.zeros((len(ii), g + n))
    table = _pair_lookup(K)
    p = table[sigma[ii], sigma[jj]]
    between = p >= 0
    rows = np.arange(len(ii))
    X[rows[between], p[between]] = 1.0
    X[rows, g + ii] += 1.0
    X[rows, g + jj] += 1.0
    return DesignMatrix(X, (ii, jj), cols, sigma)


def build_unreduced_design(graph, sigma, K: int | None = None):
    """Design with all ``K(K+1)/2`` block columns ``(k, l)``, ``k <= l``.

    Returns ``(X, block_cols)``.
    """
    n = _size(graph)
    sigma, K = _validated(n, sigma, K)
    ii, jj = pair_index(n)
    block_cols = [(k, l) for k in range(1, K + 1) for l in range(k, K + 1)]
    col_of = {c: t for t, c in enumerate(block_cols)}
    nb = len(block_cols)
    X = np.zeros((len(ii), nb + n))
    lo = np.minimum(sigma[ii], sigma[jj])
    hi = np.maximum(sigma[ii], sigma[jj])
    rows = np.arange(len(ii))
    X[rows, [col_of[(a, b)] for a, b in zip(lo, hi)]] = 1.0
    X[rows, nb + ii] += 1.0
    X[rows, nb + jj] += 1.0
    return X, block_cols


@dataclass(frozen=True)
class IdentifiabilityCheck:
    identifiable: bool
    community: int | None = None  # first community with fewer than two nodes

    def __bool__(self):
        return self.identifiable


def check_identifiability(sigma, K: int | None = None) -> IdentifiabilityCheck:
    """Full column rank holds iff every community has at least two nodes."""
    sizes = community_sizes(sigma, K)
    small = np.flatnonzero(sizes < 2)
    if len(small):
        return IdentifiabilityCheck(False, int(small[0]) + 1)
    return IdentifiabilityCheck(True)


def verify_column_dependencies(graph, sigma, K: int | None = None) -> np.ndarray:
    """Residuals of the ``K`` linear relations among unreduced columns.

    For community ``k`` the relation is
    ``2 b_kk + sum_{l != k} b_kl = sum_{v: sigma_v = k} c_v``;
    entry ``k-1`` of the result is its largest absolute violation over rows.
    """
    n = _size(graph)
    sigma, K = _validated(n, sigma, K)
    X, block_cols = build_unreduced_design(n, sigma, K)
    nb = len(block_cols)
    res = np.zeros(K)
    for k in range(1, K + 1):
        lhs = np.zeros(X.shape[0])
        for t, (a, b) in enumerate(block_cols):
            if a == b == k:
                lhs += 2 * X[:, t]
            elif k in (a, b):
                lhs += X[:, t]
        rhs = X[:, nb + np.flatnonzero(sigma == k)].sum(axis=1)
        res[k - 1] = np.abs(lhs - rhs).max()
    return res


def numeric_rank(X, rtol: float = 1e-9) -> int:
    """Rank from singular values above ``rtol`` times the largest."""
    s = np.linalg.svd(np.asarray(X, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))
