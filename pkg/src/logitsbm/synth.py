"""Synthetic networks with planted communities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .draws import as_generator
from .exceptions import DataError
from .graph import Graph
from .labels import as_labels

__all__ = ["SpikeSpec", "gen_spike", "gen_sbm", "BenchmarkSpec", "gen_benchmark"]


@dataclass(frozen=True)
class SpikeSpec:
    """Two kernel-plus-crown communities of sizes ``2 n1`` and ``2 r n1``."""

    n1: int = 10
    r: int = 5

    def __post_init__(self):
        if self.n1 < 3 or self.r < 1 or int(self.r) != self.r:
            raise ValueError("spike network needs n1 >= 3 and integer r >= 1")

    @property
    def n(self) -> int:
        return 2 * self.n1 + 2 * self.r * self.n1


def _kernel_crown(start, size):
    kernel = np.arange(start, start + size)
    ii, jj = np.triu_indices(size, k=1)
    clique = np.column_stack([kernel[ii], kernel[jj]])
    crown = np.column_stack([kernel, kernel + size])
    return kernel, np.concatenate([clique, crown])


def gen_spike(spec: SpikeSpec) -> tuple[Graph, np.ndarray]:
    """The spike network and its two-community reference labels.

    Community 1 is a complete kernel on ``n1`` nodes, each kernel node
    carrying one pendant crown node; community 2 is the same on ``r n1``
    nodes.  Kernel node ``i`` of community 1 links to kernel nodes
    ``i r .. (i+1) r - 1`` of community 2.  Nodes are numbered kernel 1,
    crown 1, kernel 2, crown 2.
    """
    n1, r = spec.n1, int(spec.r)
    k1, e1 = _kernel_crown(0, n1)
    k2, e2 = _kernel_crown(2 * n1, r * n1)
    between = np.column_stack([np.repeat(k1, r), k2])
    graph = Graph.from_edges(spec.n, np.concatenate([e1, e2, between]))
    labels = np.repeat([1, 2], [2 * n1, 2 * r * n1])
    return graph, labels


def gen_sbm(sigma, params, rng) -> Graph:
    """Sample a graph from the node-corrected logistic blockmodel."""
    sigma = as_labels(sigma)
    n = sigma.size
    K = max(int(sigma.max()), len(params.pi) if params.pi is not None else 0)
    G = params.block_matrix(K)
    ii, jj = np.triu_indices(n, k=1)
    s = G[sigma[ii] - 1, sigma[jj] - 1] + params.eta[ii] + params.eta[jj]
    prob = 0.5 * (1.0 + np.tanh(0.5 * s))
    hit = as_generator(rng).random(len(ii)) < prob
    return Graph.from_edges(n, np.column_stack([ii[hit], jj[hit]]))


@dataclass(frozen=True)
class BenchmarkSpec:
    """Power-law degrees (exponent ``a``) and community sizes (exponent ``b``).

    ``mu`` is the fraction of each node's edges that leave its community.
    Unset caps default to ``max_degree = n // 4``, ``max_community = n // 2``.
    """

    n: int = 100
    a: float = 2.0
    b: float = 1.0
    mu: float = 0.4
    avg_degree: float = 10.0
    max_degree: int | None = None
    min_community: int = 5
    max_community: int | None = None

    def __post_init__(self):
        if not 0 < self.mu < 1:
            raise ValueError("mu must lie in (0, 1)")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("power-law exponents must be positive")
        if not 0 < self.avg_degree < self.n:
            raise ValueError("average degree must lie in (0, n)")
        if self.max_degree is None:
            object.__setattr__(self, "max_degree", self.n // 4)
        if self.max_community is None:
            object.__setattr__(self, "max_community", self.n // 2)
        if self.max_degree < self.avg_degree:
            raise ValueError("max_degree below the average degree")
        if not 2 <= self.min_community <= self.max_community <= self.n:
            raise ValueError("invalid community size caps")


def _powerlaw_mean(lo, hi, expo):
    if abs(expo - 1) < 1e-12:
        return (hi - lo) / np.log(hi / lo)
    if abs(expo - 2) < 1e-12:
        return np.log(hi / lo) / (1 / lo - 1 / hi)
    e1, e2 = 1 - expo, 2 - expo
    return (e1 / e2) * (hi**e2 - lo**e2) / (hi**e1 - lo**e1)


def _powerlaw_draw(gen, lo, hi, expo, size):
    u = gen.random(size)
    if abs(expo - 1) < 1e-12:
        return lo * (hi / lo) ** u
    e1 = 1 - expo
    return (lo**e1 + u * (hi**e1 - lo**e1)) ** (1 / e1)


def _round_to_total(x, total):
    """Largest-remainder rounding of ``x`` to integers summing to ``total``."""
    base = np.floor(x).astype(np.int64)
    short = int(total - base.sum())
    if short > 0:
        base[np.argsort(-(x - base), kind="stable")[:short]] += 1
    elif short < 0:
        base[np.argsort(x - base, kind="stable")[: -short]] -= 1
    return base


def _target_degrees(spec, gen):
    hi = float(spec.max_degree)
    lo = optimize.brentq(lambda k: _powerlaw_mean(k, hi, spec.a) - spec.avg_degree, 1e-6, hi - 1e-9)
    deg = _powerlaw_draw(gen, lo, hi, spec.a, spec.n)
    for _ in range(20):
        deg = np.clip(deg * spec.avg_degree / deg.mean(), 1.0, hi)
    total = int(round(spec.n * spec.avg_degree))
    total -= total % 2
    deg = _round_to_total(deg, total)
    return np.clip(deg, 1, spec.max_degree)


def _community_sizes(spec, gen):
    sizes = []
    while sum(sizes) < spec.n:
        sizes.append(int(round(_powerlaw_draw(gen, spec.min_community, spec.max_community, spec.b, 1)[0])))
    sizes = np.array(sizes)
    while sizes.sum() > spec.n:
        room = np.flatnonzero(sizes > spec.min_community)
        if len(room) == 0:
            sizes = sizes[:-1]
            continue
        sizes[gen.choice(room)] -= 1
    if sizes.sum() < spec.n:
        return None
    return sizes


def _assign(within, sizes, gen):
    """Place nodes (largest internal degree first) into communities with room."""
    free = sizes.copy()
    comm = np.empty(len(within), dtype=np.int64)
    for i in np.argsort(-within, kind="stable"):
        ok = np.flatnonzero((free > 0) & (sizes - 1 >= within[i]))
        if len(ok) == 0:
            return None
        c = gen.choice(ok)
        comm[i] = c
        free[c] -= 1
    return comm


def _match_stubs(stubs, valid, edges, gen, passes=100):
    """Pair stubs at random; repair invalid pairs by rewiring.

    ``valid(u, v)`` says whether ``u -- v`` may be added given ``edges``
    (a set of sorted pairs, updated in place).  Returns leftover stubs.
    """
    stubs = list(gen.permutation(stubs))
    for _ in range(passes):
        residual = []
        for t in range(0, len(stubs) - 1, 2):
            u, v = int(stubs[t]), int(stubs[t + 1])
            if valid(u, v):
                edges.add((min(u, v), max(u, v)))
            else:
                residual.extend((u, v))
        if len(stubs) % 2:
            residual.append(int(stubs[-1]))
        if len(residual) < 2:
            return residual
        # swap one endpoint pair with an existing edge: (u,v)+(x,y) -> (u,x)+(v,y)
        fixed = []
        pool = list(edges)
        for t in range(0, len(residual) - 1, 2):
            u, v = residual[t], residual[t + 1]
            done = False
            if pool:
                for _ in range(20):
                    x, y = pool[gen.integers(len(pool))]
                    if gen.random() < 0.5:
                        x, y = y, x
                    if (min(x, y), max(x, y)) not in edges:
                        continue
                    edges.discard((min(x, y), max(x, y)))
                    if valid(u, x) and valid(v, y) and (u, x) != (v, y) and {u, x} != {v, y}:
                        edges.add((min(u, x), max(u, x)))
                        edges.add((min(v, y), max(v, y)))
                        done = True
                        break
                    edges.add((min(x, y), max(x, y)))
            if not done:
                fixed.extend((u, v))
        if len(residual) % 2:
            fixed.append(residual[-1])
        stubs = list(gen.permutation(fixed)) if fixed else []
        if len(stubs) < 2:
            return stubs
    return stubs


def gen_benchmark(spec: BenchmarkSpec, rng, max_tries: int = 100) -> tuple[Graph, np.ndarray]:
    """Benchmark graph with heterogeneous degrees and community sizes.

    A simplified version of the Lancichinetti-Fortunato-Radicchi
    construction: target degrees and community sizes follow truncated power
    laws, each node splits its degree into ``mu`` external and ``1 - mu``
    internal stubs, and stubs are matched uniformly (internal stubs within
    the node's community, external ones across communities).  Pairings that
    would create loops or repeated edges are rewired; a handful of stubs may
    remain unmatched.
    """
    gen = as_generator(rng)
    for _ in range(max_tries):
        deg = _target_degrees(spec, gen)
        ext_total = int(round(spec.mu * deg.sum()))
        ext_total -= ext_total % 2
        ext = np.minimum(_round_to_total(spec.mu * deg, ext_total), deg)
        within = deg - ext
        sizes = _community_sizes(spec, gen)
        if sizes is None or len(sizes) < 2:
            continue
        comm = _assign(within, sizes, gen)
        if comm is None:
            continue
        # no community may hold more than half of all external stubs
        ext_by_comm = np.bincount(comm, weights=ext, minlength=len(sizes))
        if ext_by_comm.max() > ext_by_comm.sum() / 2:
            continue
        break
    else:
        raise DataError("benchmark specification is infeasible")

    edges: set[tuple[int, int]] = set()
    inside = set()

    def valid_within(u, v):
        return u != v and comm[u] == comm[v] and (min(u, v), max(u, v)) not in inside

    for c in range(len(sizes)):
        members = np.flatnonzero(comm == c)
        stubs = np.repeat(members, within[members])
        _match_stubs(stubs, valid_within, inside, gen)
    edges |= inside

    between = set()

    def valid_cross(u, v):
        return comm[u] != comm[v] and (min(u, v), max(u, v)) not in between

    _match_stubs(np.repeat(np.arange(spec.n), ext), valid_cross, between, gen)
    edges |= between

    graph = Graph.from_edges(spec.n, np.array(sorted(edges), dtype=np.int64).reshape(-1, 2))
    return graph, comm + 1
