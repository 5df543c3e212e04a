"""Point estimates and summaries from posterior label samples.

All samples in a :class:`~logitsbm.gibbs.SampleTrace` are canonical, so
per-node label frequencies estimate the marginals of the remapped
posterior directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .labels import as_labels, remap

__all__ = [
    "centroid_from_marginals",
    "centroid_estimate",
    "expected_hamming_risk",
    "coclustering",
    "expected_binder_risk",
    "binder_estimate",
    "map_estimate",
    "gamma_credible_interval",
    "EtaDegreeDiagnostic",
    "eta_degree_diagnostic",
]


def _nonempty(trace):
    if trace is None or len(trace) == 0:
        raise ValueError("empty trace")
    return trace


def centroid_from_marginals(marginals) -> np.ndarray:
    """Remapped consensus labels from an ``(n, K)`` table of label weights.

    Each node takes its most frequent label (smallest label on ties); the
    result is then put in canonical form.
    """
    marginals = np.asarray(marginals)
    return remap(np.argmax(marginals, axis=1) + 1)[0]


def centroid_estimate(trace) -> np.ndarray:
    """Minimiser of posterior expected Hamming loss on the canonical space."""
    return centroid_from_marginals(_nonempty(trace).marginal_counts)


def expected_hamming_risk(candidate, trace) -> float:
    """Monte Carlo ``E[H(candidate, sigma)]`` over the sampled labels."""
    candidate = as_labels(candidate)
    counts = _nonempty(trace).marginal_counts
    hits = counts[np.arange(len(candidate)), candidate - 1].sum()
    return float(len(candidate) - hits / counts[0].sum())


def _unique_samples(trace):
    uniq, first, inverse, counts = np.unique(trace.sigma, axis=0, return_index=True,
                                             return_inverse=True, return_counts=True)
    return uniq, first, inverse.ravel(), counts


def _one_hot(labels, K):
    # labels: (m, n) -> (n, m*K) indicator columns
    m, n = labels.shape
    Z = np.zeros((n, m * K))
    cols = np.arange(m)[:, None] * K + (labels - 1)
    Z[np.broadcast_to(np.arange(n), (m, n)), cols] = 1.0
    return Z


def coclustering(trace, chunk: int = 256) -> np.ndarray:
    """Posterior probability that each pair of nodes shares a community."""
    _nonempty(trace)
    uniq, _, _, counts = _unique_samples(trace)
    n, K = trace.marginal_counts.shape
    P = np.zeros((n, n))
    w = counts / counts.sum()
    for s in range(0, len(uniq), chunk):
        Z = _one_hot(uniq[s:s + chunk].astype(np.int64), K)
        weights = np.repeat(w[s:s + chunk], K)
        P += (Z * weights) @ Z.T
    return P


def expected_binder_risk(candidates, trace=None, cocluster=None, chunk: int = 256) -> np.ndarray:
    """Monte Carlo expected Binder loss of each candidate labelling.

    Uses ``E B(c, sigma) = sum_{i<j} [c_i = c_j](1 - p_ij) + [c_i != c_j] p_ij``
    with ``p`` the co-clustering matrix.
    """
    cand = np.atleast_2d(np.asarray(candidates, dtype=np.int64))
    P = coclustering(trace) if cocluster is None else cocluster
    n = P.shape[0]
    M = 1.0 - 2.0 * P
    np.fill_diagonal(M, 0.0)
    base = np.triu(P, k=1).sum()
    K = int(cand.max())
    out = np.empty(len(cand))
    for s in range(0, len(cand), chunk):
        Z = _one_hot(cand[s:s + chunk], K)
        quad = (Z * (M @ Z)).sum(axis=0).reshape(-1, K).sum(axis=1)
        out[s:s + chunk] = base + 0.5 * quad
    return out


def binder_estimate(trace, include_centroid: bool = True) -> np.ndarray:
    """Candidate labelling with the smallest estimated Binder risk.

    Exact minimisation is NP-hard, so the search is restricted to the
    distinct sampled labellings (plus the centroid estimate).
    """
    _nonempty(trace)
    uniq, first, _, _ = _unique_samples(trace)
    cands = uniq[np.argsort(first)].astype(np.int64)
    if include_centroid:
        cands = np.vstack([cands, centroid_estimate(trace)])
    risk = expected_binder_risk(cands, trace)
    return remap(cands[int(np.argmin(risk))])[0]


def map_estimate(trace, mode_state=None) -> np.ndarray:
    """Most frequent sampled labelling.

    Ties go to the labelling with the highest recorded log posterior, then
    to the first encountered.  If ``mode_state`` (e.g. the mode-finding
    result) has a higher log posterior than any draw of the chosen
    labelling, its labels are returned instead.
    """
    _nonempty(trace)
    uniq, first, inverse, counts = _unique_samples(trace)
    best_lp = np.full(len(uniq), -np.inf)
    np.maximum.at(best_lp, inverse, trace.log_post)
    top = np.flatnonzero(counts == counts.max())
    top = top[best_lp[top] == best_lp[top].max()]
    pick = top[np.argmin(first[top])]
    if mode_state is not None and mode_state.log_post > best_lp[pick]:
        return remap(mode_state.sigma)[0]
    return uniq[pick].astype(np.int64)


def gamma_credible_interval(trace, level: float = 0.95) -> np.ndarray:
    """Equal-tailed intervals, one row ``(lo, hi)`` per block pair."""
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    gamma = _nonempty(trace).gamma
    tail = (1 - level) / 2
    return np.quantile(gamma, [tail, 1 - tail], axis=0).T


@dataclass
class EtaDegreeDiagnostic:
    eta_mean: np.ndarray
    logit_degree: np.ndarray
    flagged: np.ndarray  # nodes with degree 0 or n-1
    correlation: float   # nan when undefined


def eta_degree_diagnostic(trace, graph) -> EtaDegreeDiagnostic:
    """Posterior mean node effects against ``logit(degree / (n - 1))``."""
    eta_mean = _nonempty(trace).eta.mean(axis=0)
    frac = graph.degree / (graph.n - 1)
    flagged = (graph.degree == 0) | (graph.degree == graph.n - 1)
    with np.errstate(divide="ignore"):
        logit = np.log(frac) - np.log1p(-frac)
    logit[flagged] = np.nan
    ok = ~flagged
    corr = np.nan
    if ok.sum() > 2 and np.ptp(logit[ok]) > 0 and np.ptp(eta_mean[ok]) > 0:
        corr = float(np.corrcoef(eta_mean[ok], logit[ok])[0, 1])
    return EtaDegreeDiagnostic(eta_mean, logit, flagged, corr)
