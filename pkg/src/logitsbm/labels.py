"""Label vectors: canonical remapping, losses and error rates.

A label vector is a 1-D integer array with entries in ``1..K``.  It is
*canonical* when labels appear for the first time in increasing order,
i.e. ``order(sigma) == (1, 2, ..., k)``.  All positions returned to users
are 1-based, matching label values.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _kernels

__all__ = [
    "as_labels",
    "community_sizes",
    "ind",
    "order",
    "remap",
    "remap_rows",
    "is_canonical",
    "complete_relabeling",
    "permute_gamma",
    "gamma_pairs",
    "hamming",
    "binder",
    "binder_hamming_bound",
    "error_rate",
    "q_error_interval",
]

_INT64 = np.dtype(np.int64)


def as_labels(sigma) -> np.ndarray:
    sigma = np.asarray(sigma)
    if sigma.ndim != 1 or sigma.size == 0:
        raise ValueError("label vector must be a non-empty 1-D sequence")
    if not np.issubdtype(sigma.dtype, np.integer):
        if not np.all(np.mod(sigma, 1) == 0):
            raise ValueError("labels must be integers")
        sigma = sigma.astype(np.int64)
    if sigma.min() < 1:
        raise ValueError("labels must be >= 1")
    return sigma.astype(np.int64, copy=False)


def community_sizes(sigma, K: int | None = None) -> np.ndarray:
    """``N_k`` for ``k = 1..K`` (``K`` defaults to the largest label)."""
    sigma = as_labels(sigma)
    K = int(sigma.max()) if K is None else K
    return np.bincount(sigma, minlength=K + 1)[1:]


def ind(sigma) -> np.ndarray:
    """First 1-based position of each label present, listed by label value."""
    sigma = as_labels(sigma)
    _, first = np.unique(sigma, return_index=True)
    return first + 1


def order(sigma) -> np.ndarray:
    """Labels in the order of their first appearance."""
    sigma = as_labels(sigma)
    return _kernels.first_seen(sigma, int(sigma.max()))


def remap(sigma) -> tuple[np.ndarray, np.ndarray]:
    """Map ``sigma`` to its canonical representative.

    Returns ``(canonical, rho)`` where ``rho[old] = new`` for every label
    present in ``sigma`` (``rho[0]`` and absent labels are 0).  Labels are
    renumbered by first appearance, so the first node always gets label 1.
    """
    if not (type(sigma) is np.ndarray and sigma.dtype is _INT64 and sigma.ndim == 1 and sigma.size):
        sigma = as_labels(sigma)
    canonical, rho = _kernels.canonical_map(sigma)
    if rho.size == 0:
        raise ValueError("labels must be >= 1")
    return canonical, rho


def remap_rows(S) -> np.ndarray:
    """Canonical form of every row of a label matrix (one vector per row)."""
    S = np.asarray(S)
    if S.ndim != 2 or S.size == 0:
        raise ValueError("label matrix must be a non-empty 2-D array")
    S = as_labels(S.ravel()).reshape(S.shape)
    return _kernels.canonical_rows(np.ascontiguousarray(S), int(S.max()))


def is_canonical(sigma) -> bool:
    seen = order(sigma)
    return bool(np.array_equal(seen, np.arange(1, len(seen) + 1)))


def complete_relabeling(rho, K: int) -> np.ndarray:
    """Extend a partial relabeling to a permutation of ``1..K``.

    Labels missing from ``rho`` take the unused targets in increasing order.
    """
    full = np.zeros(K + 1, dtype=np.int64)
    rho = np.asarray(rho)
    full[: min(len(rho), K + 1)] = rho[: K + 1]
    free_targets = iter(sorted(set(range(1, K + 1)) - set(full[1:].tolist())))
    for k in range(1, K + 1):
        if full[k] == 0:
            full[k] = next(free_targets)
    return full


def gamma_pairs(K: int) -> list[tuple[int, int]]:
    """Off-diagonal label pairs ``(k, l)``, ``k < l``, in storage order."""
    return [(k, l) for k in range(1, K + 1) for l in range(k + 1, K + 1)]


def _pair_lookup(K: int) -> np.ndarray:
    """``(K+1, K+1)`` table of gamma indices; -1 on the diagonal."""
    table = np.full((K + 1, K + 1), -1, dtype=np.int64)
    for p, (k, l) in enumerate(gamma_pairs(K)):
        table[k, l] = table[l, k] = p
    return table


def permute_gamma(gamma, rho, K: int) -> np.ndarray:
    """Carry the block log-odds along a relabeling of the communities."""
    gamma = np.asarray(gamma, dtype=float)
    full = complete_relabeling(rho, K)
    table = _pair_lookup(K)
    out = np.empty_like(gamma)
    for p, (k, l) in enumerate(gamma_pairs(K)):
        out[table[full[k], full[l]]] = gamma[p]
    return out


def _check_pair(a, b):
    a, b = as_labels(a), as_labels(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return a, b


def hamming(a, b) -> int:
    a, b = _check_pair(a, b)
    return int(np.count_nonzero(a != b))


def _contingency(a, b) -> np.ndarray:
    table = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    return table


def _pairs(x):
    return x * (x - 1) // 2


def binder(a, b) -> int:
    """Number of node pairs co-clustered in exactly one of ``a`` and ``b``."""
    a, b = _check_pair(a, b)
    table = _contingency(a, b)
    together_a = _pairs(table.sum(axis=1)).sum()
    together_b = _pairs(table.sum(axis=0)).sum()
    together_both = _pairs(table).sum()
    return int(together_a + together_b - 2 * together_both)


def binder_hamming_bound(a, b) -> tuple[int, Fraction]:
    """Binder loss together with its Hamming upper bound ``H (n - H/2)``.

    When both vectors use exactly two labels the loss must equal
    ``H (n - H)``; both relations are asserted.
    """
    a, b = _check_pair(a, b)
    n = a.size
    B = binder(a, b)
    H = hamming(a, b)
    bound = H * (n - Fraction(H, 2))
    assert B <= bound, (B, bound)
    if len(np.union1d(a, b)) <= 2:
        assert B == H * (n - H), (B, H, n)
    return B, bound


def error_rate(estimate, reference) -> float:
    """Misclassification rate after the best matching of labels.

    The matching maximises label overlap (Hungarian algorithm), which gives
    the minimum Hamming distance over relabelings of ``estimate``.
    """
    est, ref = _check_pair(estimate, reference)
    table = _contingency(est, ref)
    rows, cols = linear_sum_assignment(table, maximize=True)
    matched = table[rows, cols].sum()
    return float(est.size - matched) / est.size


def q_error_interval(rates, q: float) -> tuple[float, float]:
    """Empirical ``(q/2, 1 - q/2)`` quantiles (linear interpolation)."""
    rates = np.asarray(rates, dtype=float).ravel()
    if rates.size == 0:
        raise ValueError("no error rates given")
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    lo, hi = np.quantile(rates, [q / 2, 1 - q / 2], method="linear")
    return float(lo), float(hi)
