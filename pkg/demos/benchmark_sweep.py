"""Error rates on power-law benchmark graphs as the mixing grows.

For each mixing level a few graphs are drawn, each is fitted with a
single short chain, and the spread of centroid error rates is summarised
by a q-error interval.  Small settings keep this to a few minutes; raise
``REPS`` and ``ITERS`` for smoother curves.

    python3 demos/benchmark_sweep.py
"""
import numpy as np

from logitsbm import Hyperparams, centroid_estimate, error_rate, fit_chains
from logitsbm.draws import RngHandle
from logitsbm.labels import q_error_interval
from logitsbm.synth import BenchmarkSpec, gen_benchmark

MUS = (0.1, 0.2, 0.3, 0.4, 0.5)
REPS = 5
ITERS, BURNIN = 600, 200


def main():
    print(" mu   between  K     median error  10%-interval")
    for mu in MUS:
        rates, between, ks = [], [], []
        for rep in range(REPS):
            graph, ref = gen_benchmark(BenchmarkSpec(n=100, mu=mu), RngHandle(rep, int(mu * 100)))
            e = graph.edges
            between.append(np.mean(ref[e[:, 0]] != ref[e[:, 1]]))
            K = int(ref.max())
            ks.append(K)
            _, traces = fit_chains(graph, Hyperparams(K), iters=ITERS, burnin=BURNIN,
                                   chains=1, restarts=8, seed=rep)
            rates.append(error_rate(centroid_estimate(traces[0]), ref))
        lo, hi = q_error_interval(rates, 0.1)
        print(f"{mu:.1f}  {np.mean(between):7.3f}  {min(ks):2d}-{max(ks):<2d}  {np.median(rates):12.3f}  [{lo:.3f}, {hi:.3f}]")


if __name__ == "__main__":
    main()
