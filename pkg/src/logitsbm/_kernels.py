"""Compiled inner loops.  All randomness comes from a numpy Generator."""
import math

import numpy as np
from numba import njit

_TRUNC = 0.64
_TRUNC_RECIP = 1.0 / _TRUNC
_PI = math.pi
_SQRT2 = math.sqrt(2.0)


@njit(cache=True)
def first_seen(sigma, top):
    # distinct labels of sigma (all in 1..top) in order of first appearance
    mark = np.zeros(top + 1, dtype=np.bool_)
    out = np.empty(min(top, sigma.size), dtype=np.int64)
    k = 0
    for v in sigma:
        if not mark[v]:
            mark[v] = True
            out[k] = v
            k += 1
    return out[:k]


@njit(cache=True)
def canonical_map(sigma):
    # rho[old] = rank of first appearance (1-based), and rho[sigma];
    # an empty rho signals a label below 1
    top = 0
    for v in sigma:
        if v < 1:
            return sigma[:0].copy(), sigma[:0].copy()
        top = max(top, v)
    rho = np.zeros(top + 1, sigma.dtype)
    out = np.empty_like(sigma)
    k = 0
    for i in range(sigma.size):
        v = sigma[i]
        if rho[v] == 0:
            k += 1
            rho[v] = k
        out[i] = rho[v]
    return out, rho


@njit(cache=True)
def canonical_rows(S, top):
    # row-wise canonical_map for labels known to lie in 1..top
    out = np.empty_like(S)
    rho = np.zeros(top + 1, S.dtype)
    for r in range(S.shape[0]):
        rho[:] = 0
        k = 0
        for i in range(S.shape[1]):
            v = S[r, i]
            if rho[v] == 0:
                k += 1
                rho[v] = k
            out[r, i] = rho[v]
    return out


@njit(cache=True)
def log1pexp(s):
    if s > 0.0:
        return s + math.log1p(math.exp(-s))
    return math.log1p(math.exp(s))


@njit(cache=True)
def _log_ndtr(x):
    v = 0.5 * math.erfc(-x / _SQRT2)
    if v <= 0.0:
        return -np.inf
    return math.log(v)


@njit(cache=True)
def _ndtr(x):
    return 0.5 * math.erfc(-x / _SQRT2)


@njit(cache=True)
def _series_term(n, x):
    # n-th coefficient of the alternating series for the J*(1, 0) density
    k = (n + 0.5) * _PI
    if x > _TRUNC:
        return k * math.exp(-0.5 * k * k * x)
    if x > 0.0:
        expnt = -1.5 * (math.log(0.5 * _PI) + math.log(x)) + math.log(k) - 2.0 * (n + 0.5) * (n + 0.5) / x
        return math.exp(expnt)
    return 0.0


@njit(cache=True)
def _exp_mass(z):
    # probability of proposing from the exponential piece (right of _TRUNC)
    t = _TRUNC
    fz = 0.125 * _PI * _PI + 0.5 * z * z
    rt = math.sqrt(1.0 / t)
    b = rt * (t * z - 1.0)
    a = -rt * (t * z + 1.0)
    if z < 20.0:
        e = fz * math.exp(fz * t)
        qdivp = 4.0 / _PI * e * (math.exp(-z) * _ndtr(b) + math.exp(z) * _ndtr(a))
    else:
        x0 = math.log(fz) + fz * t
        qdivp = 4.0 / _PI * (math.exp(x0 - z + _log_ndtr(b)) + math.exp(x0 + z + _log_ndtr(a)))
    return 1.0 / (1.0 + qdivp)


@njit(cache=True)
def _trunc_inv_gauss(rng, z):
    # inverse Gaussian(1/z, 1) restricted to (0, _TRUNC)
    t = _TRUNC
    x = t + 1.0
    if _TRUNC_RECIP > z:
        alpha = 0.0
        while rng.random() > alpha:
            e1 = rng.standard_exponential()
            e2 = rng.standard_exponential()
            while e1 * e1 > 2.0 * e2 / t:
                e1 = rng.standard_exponential()
                e2 = rng.standard_exponential()
            x = 1.0 + e1 * t
            x = t / (x * x)
            alpha = math.exp(-0.5 * z * z * x)
    else:
        mu = 1.0 / z
        while x > t:
            y = rng.standard_normal()
            y *= y
            half_mu = 0.5 * mu
            mu_y = mu * y
            x = mu + half_mu * mu_y - half_mu * math.sqrt(4.0 * mu_y + mu_y * mu_y)
            if rng.random() > mu / (mu + x):
                x = mu * mu / x
    return x


@njit(cache=True)
def pg1_draw(rng, c):
    """Exact PG(1, c) draw by the alternating-series accept/reject method."""
    z = 0.5 * abs(c)
    fz = 0.125 * _PI * _PI + 0.5 * z * z
    p_exp = _exp_mass(z)
    while True:
        if rng.random() < p_exp:
            x = _TRUNC + rng.standard_exponential() / fz
        else:
            x = _trunc_inv_gauss(rng, z)
        # series coefficients share a prefactor once x is fixed
        if x > _TRUNC:
            left = False
            pre = 1.0
            scale = -0.5 * _PI * _PI * x
        else:
            left = True
            pre = (2.0 / (_PI * x)) ** 1.5
            scale = -2.0 / x
        s = _PI * 0.5 * pre * math.exp(scale * 0.25)
        y = rng.random() * s
        n = 0
        while True:
            n += 1
            h = n + 0.5
            term = _PI * h * pre * math.exp(scale * h * h)
            if n % 2 == 1:
                s -= term
                if y <= s:
                    return 0.25 * x
            else:
                s += term
                if y > s:
                    break


@njit(cache=True)
def pg1_fill(rng, c, out):
    for t in range(c.shape[0]):
        out[t] = pg1_draw(rng, c[t])


@njit(cache=True)
def truncnorm_upper_draw(rng, mean, sd, upper):
    """N(mean, sd^2) conditioned on x <= upper."""
    alpha = (upper - mean) / sd
    if _ndtr(alpha) >= 0.1:
        while True:
            x = rng.standard_normal()
            if x <= alpha:
                return mean + sd * x
    # -x is a standard normal truncated to [a, inf) with a = -alpha > 1.28;
    # exponential proposal with the optimal rate
    a = -alpha
    lam = 0.5 * (a + math.sqrt(a * a + 4.0))
    while True:
        y = a + rng.standard_exponential() / lam
        if rng.random() <= math.exp(-0.5 * (y - lam) * (y - lam)):
            return mean - sd * y


@njit(cache=True)
def truncnorm_upper_fill(rng, mean, sd, upper, out):
    for t in range(out.shape[0]):
        out[t] = truncnorm_upper_draw(rng, mean, sd, upper)


@njit(cache=True)
def log_likelihood(adj, sigma0, G, eta):
    """sum_{i<j} A_ij s_ij - log(1 + exp(s_ij)), s_ij = G[si, sj] + eta_i + eta_j."""
    n = adj.shape[0]
    total = 0.0
    for i in range(n):
        gi = sigma0[i]
        ei = eta[i]
        for j in range(i + 1, n):
            s = G[gi, sigma0[j]] + ei + eta[j]
            total += adj[i, j] * s - log1pexp(s)
    return total


@njit(cache=True)
def sigma_sweep(rng, adj, sigma0, sizes, G, eta, logpi, take_mode):
    """One systematic scan over nodes, updating labels in place.

    Nodes whose community would drop below two members are left unchanged.
    Returns (number of label changes, number of blocked nodes).
    """
    n = adj.shape[0]
    K = G.shape[0]
    logw = np.empty(K)
    changes = 0
    blocked = 0
    for i in range(n):
        cur = sigma0[i]
        if sizes[cur] <= 2:
            blocked += 1
            continue
        ei = eta[i]
        for k in range(K):
            logw[k] = logpi[k]
        for j in range(n):
            if j == i:
                continue
            sj = sigma0[j]
            base = ei + eta[j]
            aij = adj[i, j]
            for k in range(K):
                s = G[k, sj] + base
                logw[k] += aij * s - log1pexp(s)
        best = 0
        for k in range(1, K):
            if logw[k] > logw[best]:
                best = k
        if take_mode:
            new = best
        else:
            top = logw[best]
            total = 0.0
            for k in range(K):
                logw[k] = math.exp(logw[k] - top)
                total += logw[k]
            u = rng.random() * total
            new = K - 1
            acc = 0.0
            for k in range(K):
                acc += logw[k]
                if u < acc:
                    new = k
                    break
        if new != cur:
            sizes[cur] -= 1
            sizes[new] += 1
            sigma0[i] = new
            changes += 1
    return changes, blocked


@njit(cache=True)
def pg_precision(rng, sigma0, G, lookup, eta, n_gamma, prec):
    """Draw omega_ij ~ PG(1, x_ij' beta) for all pairs and add X' Omega X to prec."""
    n = sigma0.shape[0]
    g = n_gamma
    for i in range(n):
        si = sigma0[i]
        for j in range(i + 1, n):
            sj = sigma0[j]
            w = pg1_draw(rng, G[si, sj] + eta[i] + eta[j])
            a = g + i
            b = g + j
            prec[a, a] += w
            prec[b, b] += w
            prec[a, b] += w
            prec[b, a] += w
            p = lookup[si, sj]
            if p >= 0:
                prec[p, p] += w
                prec[p, a] += w
                prec[a, p] += w
                prec[p, b] += w
                prec[b, p] += w


@njit(cache=True)
def irls_terms(adj, sigma0, G, lookup, eta, n_gamma, prec, score):
    """Add X' W X to prec and X'(y - mu) to score, W = diag(mu (1 - mu))."""
    n = sigma0.shape[0]
    g = n_gamma
    for i in range(n):
        si = sigma0[i]
        for j in range(i + 1, n):
            sj = sigma0[j]
            s = G[si, sj] + eta[i] + eta[j]
            mu = 1.0 / (1.0 + math.exp(-s))
            w = mu * (1.0 - mu)
            r = adj[i, j] - mu
            a = g + i
            b = g + j
            prec[a, a] += w
            prec[b, b] += w
            prec[a, b] += w
            prec[b, a] += w
            score[a] += r
            score[b] += r
            p = lookup[si, sj]
            if p >= 0:
                prec[p, p] += w
                prec[p, a] += w
                prec[a, p] += w
                prec[p, b] += w
                prec[b, p] += w
                score[p] += r


@njit(cache=True)
def gamma_response(adj, sigma0, lookup, n_gamma):
    """X'(A - 1/2) restricted to the gamma columns."""
    n = sigma0.shape[0]
    out = np.zeros(n_gamma)
    for i in range(n):
        si = sigma0[i]
        for j in range(i + 1, n):
            p = lookup[si, sigma0[j]]
            if p >= 0:
                out[p] += adj[i, j] - 0.5
    return out
