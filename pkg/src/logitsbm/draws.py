"""Seeded random kernels used by the sampler.

Every function takes an explicit ``rng``: either an :class:`RngHandle` or a
:class:`numpy.random.Generator`.  Identical handles produce identical draws.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exceptions import NumericalError

__all__ = [
    "RngHandle",
    "as_generator",
    "pg1",
    "pg1_array",
    "truncnorm_upper",
    "mvn_truncated_nonpositive",
    "dirichlet",
    "multinomial_index",
]


@dataclass
class RngHandle:
    """An independent random stream identified by ``(seed, stream)``.

    Not safe to share across threads; give each chain its own stream.
    """

    seed: int
    stream: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngHandle):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    raise TypeError(f"not a random generator: {rng!r}")


def pg1(c: float, rng) -> float:
    """One exact draw from the Polya-Gamma distribution PG(1, c)."""
    c = float(c)
    if not np.isfinite(c):
        raise ValueError("PG tilt must be finite")
    return _kernels.pg1_draw(as_generator(rng), c)


def pg1_array(c, rng) -> np.ndarray:
    """Independent PG(1, c_t) draws for every entry of ``c``."""
    c = np.ascontiguousarray(c, dtype=float)
    if not np.all(np.isfinite(c)):
        raise ValueError("PG tilt must be finite")
    out = np.empty(c.size)
    _kernels.pg1_fill(as_generator(rng), c.ravel(), out)
    return out.reshape(c.shape)


def truncnorm_upper(mean: float, sd: float, upper: float, rng, size=None):
    """Normal draw(s) conditioned on ``x <= upper``.

    Plain rejection is used while the acceptance probability is at least
    0.1; deeper tails use an exponential proposal.
    """
    if not sd > 0:
        raise ValueError("sd must be positive")
    gen = as_generator(rng)
    if size is None:
        x = _kernels.truncnorm_upper_draw(gen, float(mean), float(sd), float(upper))
        assert x <= upper
        return x
    out = np.empty(int(np.prod(size)))
    _kernels.truncnorm_upper_fill(gen, float(mean), float(sd), float(upper), out)
    assert np.all(out <= upper)
    return out.reshape(size)


def mvn_truncated_nonpositive(mean, cov, rng, start=None, max_attempts: int = 1000,
                              gibbs_sweeps: int = 20, stats: dict | None = None):
    """Draw from ``N(mean, cov)`` restricted to the non-positive orthant.

    Joint rejection is tried first.  If none of ``max_attempts`` proposals
    is feasible, ``gibbs_sweeps`` coordinate sweeps of truncated-normal full
    conditionals are run from ``start`` (or the clipped mean).  ``stats``,
    if given, counts how often each path was used.
    """
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    d = mean.size
    gen = as_generator(rng)
    if d == 1:
        if not cov[0, 0] > 0:
            raise NumericalError("covariance is not positive definite")
        if stats is not None:
            stats["rejection"] = stats.get("rejection", 0) + 1
        return np.array([truncnorm_upper(mean[0], np.sqrt(cov[0, 0]), 0.0, gen)])
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise NumericalError("covariance is not positive definite") from None

    batch = 10
    for _ in range(0, max_attempts, batch):
        x = mean + gen.standard_normal((batch, d)) @ chol.T
        ok = np.flatnonzero((x <= 0).all(axis=1))
        if len(ok):
            if stats is not None:
                stats["rejection"] = stats.get("rejection", 0) + 1
            return x[ok[0]]

    if stats is not None:
        stats["gibbs_fallback"] = stats.get("gibbs_fallback", 0) + 1
    prec = np.linalg.inv(cov)
    x = np.minimum(mean, 0.0) if start is None else np.minimum(np.asarray(start, dtype=float), 0.0)
    cond_sd = 1.0 / np.sqrt(np.diag(prec))
    for _ in range(gibbs_sweeps):
        for i in range(d):
            dev = x - mean
            shift = (prec[i] @ dev - prec[i, i] * dev[i]) / prec[i, i]
            x[i] = truncnorm_upper(mean[i] - shift, cond_sd[i], 0.0, gen)
    return x


def dirichlet(alpha, rng) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0):
        raise ValueError("Dirichlet parameters must be positive")
    return as_generator(rng).dirichlet(alpha)


def multinomial_index(p, rng) -> int:
    """A label in ``1..K`` drawn with probabilities ``p``."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("negative probability")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("probabilities must sum to 1")
    u = as_generator(rng).random()
    k = int(np.searchsorted(np.cumsum(p), u, side="right"))
    return min(k, len(p) - 1) + 1
