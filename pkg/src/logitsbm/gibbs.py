"""Posterior sampling for the node-corrected logistic blockmodel.

The model for an undirected graph ``A`` with labels ``sigma`` is::

    A_ij ~ Bern(logit^-1(gamma[sigma_i, sigma_j] + eta_i + eta_j))
    (gamma, eta) ~ I(gamma <= 0) N(0, tau2 I),   gamma[k, k] = 0
    pi ~ Dir(alpha),   sigma_i ~ MN(pi)  subject to N_k(sigma) >= 2

The Gibbs sampler cycles through labels (followed by canonical remapping),
mixing weights and regression coefficients, the latter through Polya-Gamma
augmentation.  :func:`mode_find` is the greedy counterpart used to pick
starting points.
"""
from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import linalg

from . import _kernels
from .draws import RngHandle, as_generator, dirichlet, mvn_truncated_nonpositive
from .exceptions import NumericalError
from .labels import _pair_lookup, as_labels, community_sizes, complete_relabeling, permute_gamma, remap

__all__ = [
    "Hyperparams",
    "ModelParams",
    "ChainState",
    "SampleTrace",
    "log_likelihood",
    "log_posterior",
    "sweep",
    "sample_sigma_sweep",
    "sample_pi",
    "sample_beta",
    "gibbs_run",
    "irls_step",
    "fit_beta",
    "mode_find",
    "draw_prior_labels",
    "multi_restart_init",
    "fit_chains",
    "potential_scale_reduction",
]

log = logging.getLogger(__name__)


@dataclass
class Hyperparams:
    """Prior settings: ``tau2`` is the ridge variance, ``alpha`` the Dirichlet vector."""

    K: int
    tau2: float = 25.0
    alpha: np.ndarray | None = None

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("K >= 2 required")
        if not self.tau2 > 0:
            raise ValueError("tau2 must be positive")
        alpha = np.ones(self.K) if self.alpha is None else np.asarray(self.alpha, dtype=float)
        if alpha.ndim == 0:
            alpha = np.full(self.K, float(alpha))
        if alpha.shape != (self.K,) or np.any(alpha <= 0):
            raise ValueError("alpha must hold K positive entries")
        self.alpha = alpha

    @property
    def n_gamma(self) -> int:
        return self.K * (self.K - 1) // 2


@lru_cache(maxsize=None)
def _upper(K):
    return np.triu_indices(K, k=1)


@dataclass
class ModelParams:
    gamma: np.ndarray
    eta: np.ndarray
    pi: np.ndarray

    def block_matrix(self, K: int) -> np.ndarray:
        """``K x K`` log-odds offsets with zero diagonal (0-based labels)."""
        G = np.zeros((K, K))
        rows, cols = _upper(K)
        G[rows, cols] = self.gamma
        G[cols, rows] = self.gamma
        return G

    def copy(self) -> "ModelParams":
        return ModelParams(self.gamma.copy(), self.eta.copy(), self.pi.copy())


@dataclass
class ChainState:
    sigma: np.ndarray
    params: ModelParams
    log_post: float = np.nan
    rng: RngHandle | np.random.Generator | None = None
    stats: dict = field(default_factory=dict)

    def copy(self) -> "ChainState":
        # the generator is shared on purpose: a copy continues the same stream
        return ChainState(self.sigma.copy(), self.params.copy(), self.log_post, self.rng,
                          copy.deepcopy(self.stats))


@dataclass
class SampleTrace:
    """Post burn-in draws of one or more chains.

    ``marginal_counts[i, k-1]`` counts the samples with ``sigma_i = k``.
    """

    sigma: np.ndarray
    gamma: np.ndarray
    eta: np.ndarray
    pi: np.ndarray
    log_post: np.ndarray
    iteration: np.ndarray
    chain: np.ndarray
    marginal_counts: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.log_post)

    @property
    def K(self) -> int:
        return self.marginal_counts.shape[1]

    @classmethod
    def pooled(cls, traces) -> "SampleTrace":
        traces = list(traces)
        return cls(
            sigma=np.concatenate([t.sigma for t in traces]),
            gamma=np.concatenate([t.gamma for t in traces]),
            eta=np.concatenate([t.eta for t in traces]),
            pi=np.concatenate([t.pi for t in traces]),
            log_post=np.concatenate([t.log_post for t in traces]),
            iteration=np.concatenate([t.iteration for t in traces]),
            chain=np.concatenate([t.chain for t in traces]),
            marginal_counts=sum(t.marginal_counts for t in traces),
            meta={"chains": [t.meta for t in traces]},
        )

    def by_chain(self, values: np.ndarray) -> list[np.ndarray]:
        return [values[self.chain == c] for c in np.unique(self.chain)]


# -- log densities -----------------------------------------------------------

def log_likelihood(graph, sigma, params: ModelParams) -> float:
    """Bernoulli-logit log likelihood summed over all node pairs."""
    sigma = as_labels(sigma)
    K = max(int(sigma.max()), len(params.pi))
    G = params.block_matrix(K)
    ii, jj = np.triu_indices(graph.n, k=1)
    s = G[sigma[ii] - 1, sigma[jj] - 1] + params.eta[ii] + params.eta[jj]
    a = graph.adjacency[ii, jj]
    return float(np.sum(a * s - np.logaddexp(0.0, s)))


def _log_prior(sigma, params: ModelParams, hyper: Hyperparams) -> float:
    sizes = community_sizes(sigma, hyper.K)
    if np.any(sizes < 2) or np.any(params.gamma > 0):
        return -np.inf
    logpi = np.log(params.pi)
    beta2 = params.gamma @ params.gamma + params.eta @ params.eta
    return float(-0.5 * beta2 / hyper.tau2 + (hyper.alpha - 1) @ logpi + sizes @ logpi)


def log_posterior(graph, sigma, params: ModelParams, hyper: Hyperparams) -> float:
    """Unnormalised joint log posterior of ``(sigma, gamma, eta, pi)``."""
    return log_likelihood(graph, sigma, params) + _log_prior(sigma, params, hyper)


def _fast_log_post(adj, sigma, params, hyper) -> float:
    G = params.block_matrix(hyper.K)
    ll = _kernels.log_likelihood(adj, sigma - 1, G, params.eta)
    sizes = np.bincount(sigma, minlength=hyper.K + 1)[1:]
    if sizes.min() < 2 or params.gamma.max(initial=-np.inf) > 0:
        return -np.inf
    logpi = np.log(params.pi)
    beta2 = params.gamma @ params.gamma + params.eta @ params.eta
    return float(ll - 0.5 * beta2 / hyper.tau2 + (hyper.alpha - 1 + sizes) @ logpi)


# -- linear algebra ----------------------------------------------------------

def sweep(A, pivots) -> np.ndarray:
    """Sweep a symmetric matrix on the given pivot indices.

    After sweeping ``A`` on the index set ``S`` with complement ``T``, the
    blocks become ``-A_SS^-1``, ``A_SS^-1 A_ST`` and the Schur complement
    ``A_TT - A_TS A_SS^-1 A_ST``.  ``A`` may also be the leading row slab
    of a symmetric matrix as long as every pivot indexes one of its rows;
    only those rows are then returned.  Returns a new array.
    """
    A = np.array(A, dtype=float)
    pivots = list(pivots)
    if pivots and max(pivots) >= A.shape[0]:
        raise IndexError("pivot outside the rows of A")
    for k in pivots:
        d = A[k, k]
        if not abs(d) > 1e-300:
            raise NumericalError(f"zero pivot at index {k}")
        row = A[k].copy()
        col = A[:, k].copy()
        A -= np.outer(col, row) / d
        A[k, :] = row / d
        A[:, k] = col / d
        A[k, k] = -1.0 / d
    return A


# -- Gibbs steps -------------------------------------------------------------

def _relabel_state(state: ChainState, K: int):
    canonical, rho = remap(state.sigma)
    full = complete_relabeling(rho, K)
    state.params.gamma = permute_gamma(state.params.gamma, full, K)
    pi = np.empty_like(state.params.pi)
    pi[full[1:] - 1] = state.params.pi
    state.params.pi = pi
    state.sigma = canonical


def sample_sigma_sweep(state: ChainState, graph, hyper: Hyperparams, take_mode: bool = False) -> ChainState:
    """Update every label in turn from its full conditional, then remap.

    A move that would leave a community with fewer than two nodes is
    rejected.  With ``take_mode`` each label is set to its conditional
    mode instead.  ``state`` is modified in place and returned.
    """
    K = hyper.K
    sigma0 = state.sigma.astype(np.int64) - 1
    sizes = np.bincount(sigma0, minlength=K).astype(np.int64)
    G = state.params.block_matrix(K)
    logpi = np.log(state.params.pi)
    gen = as_generator(state.rng) if state.rng is not None else np.random.default_rng(0)
    changes, blocked = _kernels.sigma_sweep(gen, graph.adjacency, sigma0, sizes, G,
                                            state.params.eta, logpi, take_mode)
    state.sigma = sigma0 + 1
    _relabel_state(state, K)
    state.stats["label_changes"] = state.stats.get("label_changes", 0) + int(changes)
    state.stats["blocked_moves"] = state.stats.get("blocked_moves", 0) + int(blocked)
    return state


def sample_pi(state: ChainState, hyper: Hyperparams, rng) -> np.ndarray:
    """Conjugate draw ``pi ~ Dir(alpha + N(sigma))``."""
    return dirichlet(hyper.alpha + community_sizes(state.sigma, hyper.K), rng)


def _response(graph, sigma0, lookup, n_gamma) -> np.ndarray:
    b_gamma = _kernels.gamma_response(graph.adjacency, sigma0, lookup, n_gamma)
    b_eta = graph.degree - 0.5 * (graph.n - 1)
    return np.concatenate([b_gamma, b_eta])


def sample_beta(state: ChainState, graph, hyper: Hyperparams, rng) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(gamma, eta)`` given the labels via Polya-Gamma augmentation.

    With ``omega_ij ~ PG(1, x_ij' beta)`` the coefficients are Gaussian with
    precision ``P = X' Omega X + I / tau2`` and mean ``P^-1 X'(A - 1/2)``,
    restricted to ``gamma <= 0``.  As only ``gamma`` is constrained, its
    marginal is the truncation of the Gaussian marginal; ``gamma`` is drawn
    from that, then ``eta | gamma`` from the unconstrained conditional.
    Ordering ``eta`` first, the Cholesky factor of ``P`` yields both: its
    trailing block factors the Schur complement (the precision of the
    ``gamma`` marginal) and its leading block the precision of ``eta | gamma``.
    """
    gen = as_generator(rng)
    K, g, n = hyper.K, hyper.n_gamma, graph.n
    sigma0 = state.sigma.astype(np.int64) - 1
    lookup = _pair_lookup(K)[1:, 1:]
    G = state.params.block_matrix(K)

    prec = np.zeros((g + n, g + n))
    _kernels.pg_precision(gen, sigma0, G, lookup, state.params.eta, g, prec)
    prec[np.diag_indices_from(prec)] += 1.0 / hyper.tau2
    b = _response(graph, sigma0, lookup, g)

    perm = _eta_first(g, n)
    try:
        L = linalg.cholesky(prec[np.ix_(perm, perm)], lower=True, check_finite=False)
    except linalg.LinAlgError:
        raise NumericalError("posterior precision is not positive definite") from None
    mean = linalg.cho_solve((L, True), b[perm], check_finite=False)
    m_eta, m_gamma = mean[:n], mean[n:]

    L22 = L[n:, n:]
    cov = -sweep(L22 @ L22.T, range(g))
    gamma = mvn_truncated_nonpositive(m_gamma, cov, gen, start=state.params.gamma,
                                      stats=state.stats.setdefault("gamma_draws", {}))
    # eta | gamma = m_eta - P_ee^-1 P_eg (gamma - m_gamma) + noise, P_ee = L11 L11'
    rhs = gen.standard_normal(n) - L[n:, :n].T @ (gamma - m_gamma)
    eta = m_eta + linalg.solve_triangular(L[:n, :n], rhs, lower=True, trans="T", check_finite=False)
    return gamma, eta


@lru_cache(maxsize=8)
def _eta_first(g, n):
    return np.r_[g:g + n, 0:g]


def _record_sizes(n_keep, n, g, K):
    return dict(
        sigma=np.empty((n_keep, n), dtype=np.int16 if K < 2**15 else np.int64),
        gamma=np.empty((n_keep, g)),
        eta=np.empty((n_keep, n)),
        pi=np.empty((n_keep, K)),
        log_post=np.empty(n_keep),
        iteration=np.empty(n_keep, dtype=np.int64),
    )


def gibbs_run(graph, hyper: Hyperparams, init: ChainState, iters: int = 5000, burnin: int = 1000,
              thin: int = 1, chain_id: int = 0, callback=None) -> SampleTrace:
    """Run one chain from ``init`` and keep every ``thin``-th post burn-in draw.

    Each iteration updates labels (with remapping), mixing weights, then
    ``(gamma, eta)``.  ``init.rng`` drives all draws; ``init`` itself is
    not modified.
    """
    if not iters > burnin >= 0:
        raise ValueError("need iters > burnin >= 0")
    if thin < 1:
        raise ValueError("thin must be >= 1")
    if init.rng is None:
        raise ValueError("initial state carries no random stream")
    state = init.copy()
    state.stats = {}
    K, n, g = hyper.K, graph.n, hyper.n_gamma
    gen = as_generator(state.rng)
    adj = graph.adjacency
    n_keep = (iters - burnin) // thin
    rec = _record_sizes(n_keep, n, g, K)
    counts = np.zeros((n, K), dtype=np.int64)
    rows = np.arange(n)

    t_keep = 0
    for t in range(1, iters + 1):
        sample_sigma_sweep(state, graph, hyper)
        state.params.pi = sample_pi(state, hyper, gen)
        state.params.gamma, state.params.eta = sample_beta(state, graph, hyper, gen)
        state.log_post = _fast_log_post(adj, state.sigma, state.params, hyper)
        if t > burnin and (t - burnin) % thin == 0:
            rec["sigma"][t_keep] = state.sigma
            rec["gamma"][t_keep] = state.params.gamma
            rec["eta"][t_keep] = state.params.eta
            rec["pi"][t_keep] = state.params.pi
            rec["log_post"][t_keep] = state.log_post
            rec["iteration"][t_keep] = t
            counts[rows, state.sigma - 1] += 1
            t_keep += 1
        if callback is not None:
            callback(t, state)

    meta = {
        "chain": chain_id,
        "iters": iters,
        "burnin": burnin,
        "thin": thin,
        "label_changes": state.stats.get("label_changes", 0),
        "blocked_moves": state.stats.get("blocked_moves", 0),
        "gamma_draws": state.stats.get("gamma_draws", {}),
    }
    trace = SampleTrace(chain=np.full(n_keep, chain_id), marginal_counts=counts, meta=meta, **rec)
    trace.final_state = state
    return trace


# -- mode finding ------------------------------------------------------------

def _qp_nonpositive(P, r, x0, n_con, tol=1e-10, max_iter=200):
    """Primal active-set solve of min 1/2 x'Px - r'x with x[:n_con] <= 0.

    ``x0`` must be feasible.  Returns ``(x, active)``.
    """
    x = np.array(x0, dtype=float)
    x[:n_con] = np.minimum(x[:n_con], 0.0)
    active = set(np.flatnonzero(x[:n_con] >= -tol).tolist())
    x[list(active)] = 0.0
    d = len(x)
    for _ in range(max_iter):
        free = np.array([i for i in range(d) if i not in active], dtype=np.int64)
        target = np.zeros(d)
        try:
            target[free] = linalg.solve(P[np.ix_(free, free)], r[free], assume_a="pos", check_finite=False)
        except linalg.LinAlgError:
            raise NumericalError("IRLS system is singular") from None
        step = target - x
        if np.max(np.abs(step)) <= tol * (1.0 + np.max(np.abs(x))):
            target[:n_con] = np.minimum(target[:n_con], 0.0)
            if not active:
                return target, active
            idx = np.array(sorted(active))
            lam = r[idx] - P[idx] @ target
            worst = int(np.argmin(lam))
            if lam[worst] >= -tol:
                return target, active
            active.discard(int(idx[worst]))
            x = target
            continue
        alpha, blocking = 1.0, None
        for c in free[free < n_con]:
            if step[c] > 0:
                a = -x[c] / step[c]
                if a < alpha:
                    alpha, blocking = a, int(c)
        x = x + alpha * step
        if blocking is not None:
            x[blocking] = 0.0
            active.add(blocking)
    raise NumericalError("active-set iteration did not converge")


def _beta_objective(adj, sigma0, G_of, gamma, eta, tau2):
    G = G_of(gamma)
    return _kernels.log_likelihood(adj, sigma0, G, eta) - 0.5 * (gamma @ gamma + eta @ eta) / tau2


def irls_step(graph, sigma, gamma, eta, hyper: Hyperparams, max_halvings: int = 30):
    """One ridge-IRLS update of ``(gamma, eta)`` with ``gamma <= 0`` enforced.

    The weighted least-squares problem is solved by an active-set method;
    the step is halved until the penalised log likelihood does not drop.
    Returns ``(gamma, eta, active_set)``.
    """
    K, g, n = hyper.K, hyper.n_gamma, graph.n
    sigma0 = as_labels(sigma) - 1
    lookup = _pair_lookup(K)[1:, 1:]
    adj = graph.adjacency

    def G_of(gm):
        return ModelParams(gm, eta, None).block_matrix(K)

    beta = np.concatenate([gamma, eta])
    prec = np.zeros((g + n, g + n))
    score = np.zeros(g + n)
    _kernels.irls_terms(adj, sigma0, G_of(gamma), lookup, eta, g, prec, score)
    # X'W z with z = X beta + W^-1 (y - mu)
    r = prec @ beta + score
    prec[np.diag_indices_from(prec)] += 1.0 / hyper.tau2
    new, active = _qp_nonpositive(prec, r, beta, g)

    f_old = _beta_objective(adj, sigma0, G_of, beta[:g], beta[g:], hyper.tau2)
    slack = 1e-9 * max(1.0, abs(f_old))
    for _ in range(max_halvings + 1):
        f_new = _beta_objective(adj, sigma0, G_of, new[:g], new[g:], hyper.tau2)
        if f_new >= f_old:
            return new[:g], new[g:], active
        if f_old - f_new <= slack:
            return beta[:g], beta[g:], active
        new = 0.5 * (beta + new)
    raise NumericalError("IRLS step failed to improve after step halving")


def fit_beta(graph, sigma, hyper: Hyperparams, gamma=None, eta=None, max_iter: int = 100, tol: float = 1e-10):
    """Penalised maximum likelihood for ``(gamma, eta)`` with labels held fixed."""
    g = hyper.n_gamma
    gamma = np.zeros(g) if gamma is None else np.minimum(np.asarray(gamma, dtype=float), 0.0)
    if eta is None:
        dens = np.clip(graph.degree / max(graph.n - 1, 1), 1e-3, 1 - 1e-3)
        eta = 0.5 * np.log(dens / (1 - dens))
    eta = np.asarray(eta, dtype=float)
    for _ in range(max_iter):
        new_gamma, new_eta, _ = irls_step(graph, sigma, gamma, eta, hyper)
        delta = max(np.max(np.abs(new_gamma - gamma), initial=0.0), np.max(np.abs(new_eta - eta)))
        gamma, eta = new_gamma, new_eta
        if delta < tol:
            break
    return gamma, eta


def _dirichlet_mode(sigma, hyper):
    a = hyper.alpha + community_sizes(sigma, hyper.K) - 1.0
    return a / a.sum()


# Starting point for ascent from a bare label vector.  Fitting (gamma, eta)
# to arbitrary labels gives gamma close to 0, and the first greedy sweep is
# then driven by pi alone and empties the smaller communities.  A floor on
# the block contrast and flat mixing weights avoid that collapse.
_START_GAMMA_CAP = -0.5


def _state_from_labels(graph, sigma, hyper, rng) -> ChainState:
    sigma, _ = remap(sigma)
    sizes = community_sizes(sigma, hyper.K)
    if len(sizes) != hyper.K or np.any(sizes < 2):
        raise ValueError("initial labels must use all K communities with at least two nodes each")
    gamma, eta = fit_beta(graph, sigma, hyper)
    params = ModelParams(np.minimum(gamma, _START_GAMMA_CAP), eta, np.full(hyper.K, 1.0 / hyper.K))
    state = ChainState(sigma, params, rng=rng)
    state.log_post = _fast_log_post(graph.adjacency, sigma, params, hyper)
    return state


def mode_find(graph, hyper: Hyperparams, init, max_iter: int = 100, tol: float = 1e-8) -> ChainState:
    """Greedy cyclic ascent towards a posterior mode.

    Each cycle sets every label to its conditional mode (keeping communities
    of size at least two, then remapping), sets ``pi`` to the Dirichlet mode
    and takes one constrained ridge-IRLS step for ``(gamma, eta)``.  Stops
    when the log posterior gains less than ``tol``.  ``init`` is a label
    vector or a :class:`ChainState`; the best state visited is returned,
    with the per-cycle log posteriors in ``stats["history"]``.
    """
    if isinstance(init, ChainState):
        state = init.copy()
        state.log_post = _fast_log_post(graph.adjacency, state.sigma, state.params, hyper)
    else:
        state = _state_from_labels(graph, init, hyper, None)
    history = [state.log_post]
    best = state.copy()
    for _ in range(max_iter):
        sample_sigma_sweep(state, graph, hyper, take_mode=True)
        state.params.pi = _dirichlet_mode(state.sigma, hyper)
        gamma, eta, _ = irls_step(graph, state.sigma, state.params.gamma, state.params.eta, hyper)
        state.params.gamma, state.params.eta = gamma, eta
        state.log_post = _fast_log_post(graph.adjacency, state.sigma, state.params, hyper)
        history.append(state.log_post)
        gain = state.log_post - best.log_post
        if gain > 0:
            best = state.copy()
        if gain < tol:
            break
    best.stats["history"] = history
    return best


def draw_prior_labels(n: int, hyper: Hyperparams, rng, max_tries: int = 10_000) -> np.ndarray:
    """Canonical labels from the constrained prior (rejecting any ``N_k < 2``)."""
    if n < 2 * hyper.K:
        raise ValueError("need at least two nodes per community")
    gen = as_generator(rng)
    for _ in range(max_tries):
        pi = gen.dirichlet(hyper.alpha)
        sigma = gen.choice(hyper.K, size=n, p=pi) + 1
        if np.all(community_sizes(sigma, hyper.K) >= 2):
            return remap(sigma)[0]
    raise RuntimeError("could not draw labels satisfying the size constraint")


def multi_restart_init(graph, hyper: Hyperparams, restarts: int, rng, max_iter: int = 100) -> ChainState:
    """Best :func:`mode_find` result over ``restarts`` prior label draws.

    Restarts consume ``rng`` sequentially, so a run with more restarts
    extends the candidate set of a run with fewer.  The returned state
    carries ``rng`` for subsequent sampling.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    gen = as_generator(rng)
    best, scores = None, []
    for _ in range(restarts):
        sigma = draw_prior_labels(graph.n, hyper, gen)
        cand = mode_find(graph, hyper, sigma, max_iter=max_iter)
        scores.append(cand.log_post)
        if best is None or cand.log_post > best.log_post:
            best = cand
    best.rng = rng
    best.stats["restart_log_posts"] = scores
    return best


def _run_chain(args):
    graph, hyper, start, iters, burnin, thin, c = args
    trace = gibbs_run(graph, hyper, start, iters, burnin, thin, chain_id=c)
    trace.final_state.rng = None  # generators are not worth shipping back
    return trace


def fit_chains(graph, hyper: Hyperparams, iters: int = 5000, burnin: int = 1000, thin: int = 1,
               chains: int = 4, restarts: int = 32, seed: int = 0, init: ChainState | None = None,
               jobs: int = 1):
    """Mode-finding initialisation followed by ``chains`` Gibbs chains.

    Stream ``0`` of ``seed`` drives the restarts; chain ``c`` uses stream
    ``c + 1``.  With ``jobs > 1`` chains run in worker processes; the
    draws do not depend on ``jobs``.  Returns ``(init_state, traces)``.
    """
    if graph.n <= hyper.K:
        raise ValueError("need more nodes than communities")
    if chains < 1:
        raise ValueError("chains must be >= 1")
    if init is None:
        init = multi_restart_init(graph, hyper, restarts, RngHandle(seed, 0))
    tasks = []
    for c in range(chains):
        start = init.copy()
        start.rng = RngHandle(seed, c + 1)
        tasks.append((graph, hyper, start, iters, burnin, thin, c))
    if jobs > 1 and chains > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(jobs, chains)) as pool:
            traces = list(pool.map(_run_chain, tasks))
    else:
        traces = []
        for task in tasks:
            log.info("chain %d: %d iterations", task[-1], iters)
            traces.append(gibbs_run(*task[:-1], chain_id=task[-1]))
    return init, traces


def potential_scale_reduction(chains) -> float:
    """Split-chain Gelman-Rubin statistic for draws shaped ``(chains, draws)``."""
    x = np.atleast_2d(np.asarray(chains, dtype=float))
    half = x.shape[1] // 2
    if half < 2:
        return np.nan
    x = np.concatenate([x[:, :half], x[:, half:2 * half]])
    m, t = x.shape
    within = x.var(axis=1, ddof=1).mean()
    between = t * x.mean(axis=1).var(ddof=1)
    if within == 0:
        return 1.0 if between == 0 else np.inf
    var_plus = (t - 1) / t * within + between / t
    return float(np.sqrt(var_plus / within))
