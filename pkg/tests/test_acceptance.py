"""Exit criteria.  Each test prints one ``criterion N: PASS|FAIL`` line.

Run on its own with ``pytest -m acceptance -s``; the lines are also
collected in the terminal summary.
"""
import itertools
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from logitsbm.design import build_design, check_identifiability, numeric_rank, verify_column_dependencies
from logitsbm.draws import RngHandle, pg1_array
from logitsbm.estimators import centroid_estimate, gamma_credible_interval
from logitsbm.gibbs import ChainState, Hyperparams, ModelParams, fit_chains, gibbs_run
from logitsbm.graph import Graph, load_gml
from logitsbm.labels import binder, binder_hamming_bound, error_rate, hamming, remap, remap_rows
from logitsbm.synth import BenchmarkSpec, SpikeSpec, gen_benchmark, gen_spike

from oracles import canonical_support, exact_rank, pg_mean, pg_series, posterior_means_n4
from test_estimators import make_trace

pytestmark = pytest.mark.acceptance


def _canonical(c):
    # starts at 1 and the running maximum never jumps by more than one
    return c[0] == 1 and np.diff(np.maximum.accumulate(c)).max(initial=0) <= 1


def test_remap_suite(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    bad = 0
    sizes = rng.integers(1, 51, 100_000)
    ks = rng.integers(1, 7, 100_000)
    keys = rng.random((100_000, 10, 6))
    for n, K, key in zip(sizes, ks, keys):
        sigma = rng.integers(1, K + 1, n)
        canon, _ = remap(sigma)
        # column 0 is a placeholder so that row[label] is the image of label
        phi = np.zeros((10, K + 1), dtype=np.int64)
        phi[:, 1:] = np.argsort(key[:, :K], axis=1) + 1
        images = remap_rows(np.vstack([phi[:, sigma], canon]))
        bad += not (_canonical(canon) and (images == canon).all())
    worked = remap([2, 2, 3, 1, 3, 4, 2, 1])[0].tolist() == [1, 1, 2, 3, 2, 4, 1, 3]
    # the row-wise form agrees with one-at-a-time remapping
    S = rng.integers(1, 7, (1000, 30))
    bad += int(np.sum(remap_rows(S) != np.array([remap(r)[0] for r in S])))
    dt = time.perf_counter() - t0
    verdict(1, bad == 0 and worked and dt < 10,
            f"1e5 vectors, {bad} failures, worked example {'ok' if worked else 'wrong'}, {dt:.1f}s")


def test_identifiability_suite(verdict):
    t0 = time.perf_counter()
    checked = mismatched = 0
    worst = 0.0
    for K in (2, 3):
        for n in range(2, 8):
            for sigma in itertools.product(range(1, K + 1), repeat=n):
                if len(set(sigma)) < 2:
                    continue
                X = build_design(n, sigma, K).X
                full = numeric_rank(X) == X.shape[1]
                sizes_ok = min(np.bincount(sigma, minlength=K + 1)[1:]) >= 2
                # exact arithmetic confirms the floating point rank
                full_exact = exact_rank(X.astype(int).tolist()) == X.shape[1]
                mismatched += (full != sizes_ok) or (full_exact != full) or \
                    (bool(check_identifiability(sigma, K)) != sizes_ok)
                worst = max(worst, float(verify_column_dependencies(n, sigma, K).max()))
                checked += 1
    dt = time.perf_counter() - t0
    verdict(2, mismatched == 0 and worst == 0 and dt < 30,
            f"{checked} label vectors, {mismatched} rank mismatches, max residual {worst:g}, {dt:.1f}s")


def _binder_brute(A, B):
    # pair-by-pair disagreement counts for stacked label vectors
    same_a = A[:, :, None] == A[:, None, :]
    same_b = B[:, :, None] == B[:, None, :]
    n = A.shape[1]
    return np.triu(same_a != same_b, k=1).reshape(len(A), n * n).sum(axis=1)


def test_binder_bound_suite(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    violations = 0
    for n in (5, 10, 20):
        for K in (2, 3, 4):
            A = rng.integers(1, K + 1, (10_000, n))
            B = rng.integers(1, K + 1, (10_000, n))
            # a share of near-identical pairs so small H is well covered
            flip = rng.random((10_000, n)) < 0.1
            B[::2] = np.where(flip, B, A)[::2]
            brute = _binder_brute(A, B)
            H = (A != B).sum(axis=1)
            violations += int(np.sum(2 * brute > H * (2 * n - H)))
            if K == 2:
                violations += int(np.sum(brute != H * (n - H)))
            for a, b, v in zip(A[:200], B[:200], brute[:200]):
                violations += binder(a, b) != v or binder_hamming_bound(a, b)[0] != v or hamming(a, b) != (a != b).sum()
    dt = time.perf_counter() - t0
    verdict(3, violations == 0 and dt < 10, f"9 (n, K) cells x 1e4 pairs, {violations} violations, {dt:.1f}s")


def test_centroid_suite(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    support = np.array(canonical_support(5))
    everything = np.array(list(itertools.product([1, 2], repeat=5)))
    # integer losses: ham[v, s] = Hamming distance of candidate v to support point s
    ham = (everything[:, None, :] != support[None, :, :]).sum(axis=2)
    wrong = 0
    for _ in range(50):
        w = rng.integers(1, 100, len(support))
        risk = ham @ w
        best = everything[risk == risk.min()]
        est = centroid_estimate(make_trace(np.repeat(support, w, axis=0), K=2))
        hit = any(np.array_equal(est, b) for b in best)
        wrong += not hit or (len(best) == 1 and not np.array_equal(est, best[0]))
    dt = time.perf_counter() - t0
    verdict(4, wrong == 0 and dt < 60, f"50 posteriors over {len(support)} canonical states, {wrong} mismatches, {dt:.1f}s")


def test_pg_means(verdict):
    t0 = time.perf_counter()
    draws = 1_000_000
    worst = 0.0
    for c in (0.0, 0.5, 1.0, 2.0, 4.0):
        x = pg1_array(np.full(draws, c), RngHandle(5, int(c * 10)))
        y = pg_series(c, draws, np.random.default_rng(int(c * 10)))
        se_x = x.std(ddof=1) / np.sqrt(draws)
        se_y = y.std(ddof=1) / np.sqrt(draws)
        z = [abs(x.mean() - pg_mean(c)) / se_x,
             abs(y.mean() - pg_mean(c)) / se_y,
             abs(x.mean() - y.mean()) / np.hypot(se_x, se_y)]
        worst = max(worst, *z)
    dt = time.perf_counter() - t0
    verdict(5, worst < 3 and dt < 60, f"largest deviation {worst:.2f} standard errors, {dt:.1f}s")


def test_sampler_against_quadrature(verdict):
    t0 = time.perf_counter()
    adj = [[0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0]]
    sigma = [1, 1, 2, 2]
    exact = posterior_means_n4(adj, sigma, tau2=4.0)
    graph = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    # size-two communities cannot lose a node, so the labels never move
    init = ChainState(np.array(sigma), ModelParams(np.array([-1.0]), np.zeros(4), np.full(2, 0.5)),
                      rng=RngHandle(6, 1))
    tr = gibbs_run(graph, Hyperparams(2, tau2=4.0), init, iters=101_000, burnin=1_000)
    fixed = bool(np.all(tr.sigma == sigma))
    est = np.r_[tr.gamma.mean(axis=0), tr.eta.mean(axis=0)]
    err = float(np.abs(est - exact).max())
    dt = time.perf_counter() - t0
    verdict(6, fixed and err < 0.05 and dt < 300,
            f"gamma {est[0]:.3f} vs {exact[0]:.3f}, max abs error {err:.3f}, {dt:.1f}s")


def test_spike_recovery(verdict):
    t0 = time.perf_counter()
    graph, ref = gen_spike(SpikeSpec(n1=10, r=5))
    rates = []
    for seed in range(20):
        _, traces = fit_chains(graph, Hyperparams(2), chains=1, seed=seed)
        rates.append(error_rate(centroid_estimate(traces[0]), ref))
    exact = sum(r == 0 for r in rates)
    dt = time.perf_counter() - t0
    verdict(7, exact >= 16 and dt < 600, f"{exact}/20 seeds with zero error, worst {max(rates):.3f}, {dt:.0f}s")


def test_benchmark_generator(verdict):
    t0 = time.perf_counter()
    worst_mix = worst_deg = 0.0
    for mu in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6):
        spec = BenchmarkSpec(n=100, a=2.0, b=1.0, mu=mu, avg_degree=10.0)
        for rep in range(100):
            g, ref = gen_benchmark(spec, RngHandle(rep, int(mu * 10)))
            e = g.edges
            between = float(np.mean(ref[e[:, 0]] != ref[e[:, 1]]))
            worst_mix = max(worst_mix, abs(between - mu))
            worst_deg = max(worst_deg, abs(2 * g.m / g.n - 10.0) / 10.0)
    dt = time.perf_counter() - t0
    verdict(8, worst_mix <= 0.03 and worst_deg <= 0.10 and dt < 300,
            f"600 graphs, max |between - mu| {worst_mix:.4f}, max degree deviation {worst_deg:.1%}, {dt:.0f}s")


def test_political_blogs(verdict):
    path = os.environ.get("LOGITSBM_POLBLOGS")
    if not path or not os.path.exists(path):
        verdict(9, None, "dataset absent (set LOGITSBM_POLBLOGS to the GML file)")
    t0 = time.perf_counter()
    graph, labels = load_gml(path)
    graph, keep = graph.largest_component()
    labels = labels[keep]
    _, traces = fit_chains(graph, Hyperparams(2), chains=1, seed=0)
    rate = error_rate(centroid_estimate(traces[0]), labels)
    lo, hi = gamma_credible_interval(traces[0], 0.95)[0]
    dt = time.perf_counter() - t0
    verdict(9, 0.04 <= rate <= 0.07 and hi < -2 and dt < 7200,
            f"n={graph.n}, error rate {rate:.4f}, gamma 95% interval [{lo:.2f}, {hi:.2f}], {dt:.0f}s")


def test_cli_reproducible(tmp_path, verdict):
    def cli(*args):
        res = subprocess.run([sys.executable, "-m", "logitsbm", *map(str, args)], capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
    data = tmp_path / "data"
    cli("generate", "spike", "--n1", 10, "--r", 5, "--out", data)
    runs = []
    for name in ("a", "b"):
        cli("fit", "--graph", data / "edges.txt", "--k", 2, "--iters", 400, "--burnin", 100,
            "--chains", 2, "--restarts", 8, "--seed", 11, "--out", tmp_path / name)
        runs.append(tmp_path / name)
    files = sorted(p.name for p in runs[0].glob("*.csv"))
    differ = [f for f in files if (runs[0] / f).read_bytes() != (runs[1] / f).read_bytes()]
    verdict(10, len(files) >= 7 and not differ, f"{len(files)} CSV files compared, {len(differ)} differ")
