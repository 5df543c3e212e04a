"""``logitsbm`` command-line program.

Subcommands::

    generate {spike,sbm,benchmark}   write a synthetic graph and its labels
    fit                              restarts, mode finding and Gibbs chains
    estimate                         point estimates and summaries of a fit
    evaluate                         error rates against reference labels

Every flag ``--some-flag`` may also be set through the environment variable
``LOGITSBM_SOME_FLAG``; explicit flags win.  Exit status is 0 on success,
2 on usage errors, 3 on bad input data and 4 on numerical failure.
"""
from __future__ import annotations

import argparse
import glob
import json
import logging
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from .exceptions import DataError, NumericalError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
ENV_PREFIX = "LOGITSBM_"

log = logging.getLogger("logitsbm")


class UsageError(Exception):
    pass


# -- argument handling -------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _open_fraction(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return v


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text}") from None


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text}") from None


def _env_name(option: str) -> str:
    return ENV_PREFIX + option.lstrip("-").replace("-", "_").upper()


def _apply_env(parser: argparse.ArgumentParser, environ) -> None:
    """Turn ``LOGITSBM_*`` variables into defaults for matching flags."""
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                _apply_env(sub, environ)
            continue
        longs = [o for o in action.option_strings if o.startswith("--")]
        if not longs or action.dest == "help":
            continue
        name = _env_name(longs[0])
        if name not in environ:
            continue
        raw = environ[name]
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            value = raw.strip().lower() in {"1", "true", "yes", "on"}
            if isinstance(action, argparse._StoreFalseAction):
                value = not value
        else:
            try:
                value = action.type(raw) if action.type else raw
            except (argparse.ArgumentTypeError, ValueError) as exc:
                parser.error(f"{name}: {exc}")
            if action.choices is not None and value not in action.choices:
                parser.error(f"{name}: invalid choice {raw!r}")
        action.default = value
        action.required = False


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logitsbm", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    # generate
    gen = sub.add_parser("generate", help="write a synthetic graph with reference labels")
    kinds = gen.add_subparsers(dest="kind", required=True)

    def _gen_common(sp):
        sp.add_argument("--seed", type=_nonneg_int, default=0)
        sp.add_argument("--out", required=True, help="output directory")

    sp = kinds.add_parser("spike", help="kernel/crown spike network")
    sp.add_argument("--n1", type=int, default=10, help="kernel size of community 1")
    sp.add_argument("--r", type=int, default=5, help="size ratio of community 2")
    _gen_common(sp)

    sp = kinds.add_parser("sbm", help="draw from the logistic blockmodel")
    sp.add_argument("--sizes", type=_int_list, required=True, help="community sizes, e.g. 30,30,40")
    sp.add_argument("--gamma", type=_float_list, default=[-3.0],
                    help="between-block log-odds: one value or one per pair (1,2),(1,3),...")
    sp.add_argument("--eta", type=float, default=-1.0, help="mean node effect")
    sp.add_argument("--eta-sd", type=float, default=0.0, help="spread of node effects")
    _gen_common(sp)

    sp = kinds.add_parser("benchmark", help="power-law benchmark with planted communities")
    sp.add_argument("--n", type=_positive_int, default=100)
    sp.add_argument("--a", type=_positive_float, default=2.0, help="degree exponent")
    sp.add_argument("--b", type=_positive_float, default=1.0, help="community-size exponent")
    sp.add_argument("--mu", type=_open_fraction, required=True, help="mixing parameter")
    sp.add_argument("--avg-degree", type=_positive_float, default=10.0)
    sp.add_argument("--max-degree", type=_positive_int, default=None)
    sp.add_argument("--min-community", type=_positive_int, default=5)
    sp.add_argument("--max-community", type=_positive_int, default=None)
    _gen_common(sp)

    # fit
    fit = sub.add_parser("fit", help="run the sampler")
    fit.add_argument("--graph", required=True, help="edge list (or .gml), '-' for stdin")
    fit.add_argument("--k", type=int, required=True, help="number of communities")
    fit.add_argument("--tau2", type=_positive_float, default=25.0, help="prior variance of gamma, eta")
    fit.add_argument("--alpha", type=_float_list, default=[1.0],
                     help="Dirichlet parameter: one value or K values")
    fit.add_argument("--iters", type=_positive_int, default=5000)
    fit.add_argument("--burnin", type=_nonneg_int, default=1000)
    fit.add_argument("--thin", type=_positive_int, default=1)
    fit.add_argument("--chains", type=_positive_int, default=4)
    fit.add_argument("--restarts", type=_positive_int, default=32)
    fit.add_argument("--seed", type=_nonneg_int, default=0)
    fit.add_argument("--jobs", type=_positive_int, default=1, help="worker processes for chains")
    fit.add_argument("--drop-isolated", action="store_true", help="remove zero-degree nodes")
    fit.add_argument("--label-key", default="value", help="node attribute holding labels (GML input)")
    fit.add_argument("--out", required=True, help="trace directory")

    # estimate
    est = sub.add_parser("estimate", help="point estimates from a trace directory")
    est.add_argument("--trace-dir", required=True)
    est.add_argument("--estimator", choices=["centroid", "binder", "map"], default="centroid")
    est.add_argument("--level", type=_open_fraction, default=0.95, help="credible level for gamma")
    est.add_argument("--distances", action="store_true",
                     help="also write pairwise Binder distances between distinct samples")
    est.add_argument("--max-distinct", type=_positive_int, default=500,
                     help="cap on distinct samples in the distance table")
    est.add_argument("--out", default=None, help="output directory (default: the trace directory)")

    # evaluate
    ev = sub.add_parser("evaluate", help="error rates against reference labels")
    ev.add_argument("--reference", required=True, help="reference label file")
    ev.add_argument("--estimate", default=None, help="estimated label file")
    ev.add_argument("--runs-glob", default=None, help="glob of estimated label files")
    ev.add_argument("--q", type=_open_fraction, default=0.10, help="q for the q-error interval")
    ev.add_argument("--graph", default=None,
                    help="graph whose nodes both files must cover (default: reference tokens)")
    return p


# -- helpers -----------------------------------------------------------------

def _versions() -> dict:
    import numba
    import scipy

    from . import __version__

    return {
        "logitsbm": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


def _load_graph(path, drop_isolated, label_key="value"):
    from .graph import load_edge_list, load_gml

    if path != "-" and not os.path.exists(path):
        raise DataError(f"{path}: no such file")
    if str(path).lower().endswith(".gml"):
        graph, _ = load_gml(path, label_key=label_key, drop_isolated=drop_isolated)
        return graph
    return load_edge_list(path, drop_isolated=drop_isolated)


class _TokenGraph:
    """Stand-in exposing the token index that :func:`load_labels` needs."""

    def __init__(self, tokens):
        self.tokens = tuple(tokens)
        self.n = len(self.tokens)
        self._token_index = {t: i for i, t in enumerate(self.tokens)}


def _label_tokens(path):
    from .graph import _data_lines, _open_text

    stream, close = _open_text(path)
    try:
        seen, order = set(), []
        for lineno, parts in _data_lines(stream):
            if len(parts) != 2:
                raise DataError(f"{path}: line {lineno}: expected 'token label'")
            if parts[0] not in seen:
                seen.add(parts[0])
                order.append(parts[0])
        return order
    finally:
        if close:
            stream.close()


def _emit(obj, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(obj, sort_keys=True) + "\n")


# -- commands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    from .graph import write_edge_list, write_labels
    from .synth import BenchmarkSpec, SpikeSpec, gen_benchmark, gen_sbm, gen_spike
    from .draws import RngHandle, as_generator
    from .gibbs import ModelParams
    from .traceio import write_json

    out = Path(args.out)
    params: dict = {"kind": args.kind, "seed": args.seed}
    rng = RngHandle(args.seed, 0)
    try:
        if args.kind == "spike":
            spec = SpikeSpec(n1=args.n1, r=args.r)
            graph, ref = gen_spike(spec)
            params.update(n1=args.n1, r=args.r)
        elif args.kind == "sbm":
            sizes = args.sizes
            if len(sizes) < 2 or min(sizes) < 1:
                raise UsageError("--sizes needs at least two positive sizes")
            K = len(sizes)
            n_pairs = K * (K - 1) // 2
            gamma = np.asarray(args.gamma, dtype=float)
            if gamma.size == 1:
                gamma = np.full(n_pairs, gamma[0])
            if gamma.size != n_pairs:
                raise UsageError(f"--gamma needs 1 or {n_pairs} values")
            if np.any(gamma > 0):
                raise UsageError("--gamma values must be <= 0")
            if args.eta_sd < 0:
                raise UsageError("--eta-sd must be >= 0")
            sigma = np.repeat(np.arange(1, K + 1), sizes)
            gen = as_generator(rng)
            eta = args.eta + args.eta_sd * gen.standard_normal(len(sigma))
            model = ModelParams(gamma=gamma, eta=eta, pi=np.asarray(sizes) / sum(sizes))
            graph = gen_sbm(sigma, model, gen)
            ref = sigma
            params.update(sizes=sizes, gamma=gamma.tolist(), eta=args.eta, eta_sd=args.eta_sd)
        else:
            spec = BenchmarkSpec(n=args.n, a=args.a, b=args.b, mu=args.mu, avg_degree=args.avg_degree,
                                 max_degree=args.max_degree, min_community=args.min_community,
                                 max_community=args.max_community)
            graph, ref = gen_benchmark(spec, rng)
            params.update(n=spec.n, a=spec.a, b=spec.b, mu=spec.mu, avg_degree=spec.avg_degree,
                          max_degree=spec.max_degree, min_community=spec.min_community,
                          max_community=spec.max_community)
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise UsageError(str(exc)) from None

    dropped = int(np.sum(graph.degree == 0))
    if dropped:
        # isolated nodes cannot be represented in an edge list
        keep = graph.degree > 0
        graph, ref = graph.subgraph(keep), np.asarray(ref)[keep]
        log.warning("dropped %d isolated nodes", dropped)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(graph, out / "edges.txt")
    write_labels(ref, graph, out / "reference.txt")
    write_json({"command": "generate", "params": params, "n": graph.n, "m": graph.m,
                "isolated_dropped": dropped, "versions": _versions()}, out / "metadata.json")
    _emit({"edges": str(out / "edges.txt"), "reference": str(out / "reference.txt"),
           "n": graph.n, "m": graph.m})
    return EXIT_OK


def cmd_fit(args) -> int:
    from .gibbs import Hyperparams, fit_chains, potential_scale_reduction
    from .traceio import file_digest, write_trace_dir

    if args.k < 2:
        raise UsageError("K >= 2 required")
    if args.burnin >= args.iters:
        raise UsageError("--burnin must be smaller than --iters")
    alpha = np.asarray(args.alpha, dtype=float)
    if alpha.size not in (1, args.k) or np.any(alpha <= 0):
        raise UsageError(f"--alpha needs 1 or {args.k} positive values")
    if alpha.size == 1:
        alpha = np.full(args.k, alpha[0])
    graph = _load_graph(args.graph, args.drop_isolated, args.label_key)
    if graph.n <= args.k:
        raise DataError(f"graph has {graph.n} nodes; need more than K = {args.k}")
    hyper = Hyperparams(K=args.k, tau2=args.tau2, alpha=alpha)

    t0 = time.perf_counter()
    init, traces = fit_chains(graph, hyper, iters=args.iters, burnin=args.burnin, thin=args.thin,
                              chains=args.chains, restarts=args.restarts, seed=args.seed,
                              jobs=args.jobs)
    elapsed = time.perf_counter() - t0

    psrf = {}
    if len(traces) > 1:
        psrf["log_post"] = potential_scale_reduction([t.log_post for t in traces])
        for j in range(hyper.n_gamma):
            psrf[f"gamma_{j}"] = potential_scale_reduction([t.gamma[:, j] for t in traces])
    chain_meta = []
    for t in traces:
        m = dict(t.meta)
        m["gamma_draws"] = {k: int(v) for k, v in m.get("gamma_draws", {}).items()}
        m["seed_stream"] = int(m["chain"]) + 1
        chain_meta.append(m)
    inputs = {"graph": args.graph}
    if args.graph != "-":
        inputs["sha256"] = file_digest(args.graph)
    metadata = {
        "command": "fit",
        "K": args.k,
        "n": graph.n,
        "m": graph.m,
        "hyperparams": {"tau2": args.tau2, "alpha": alpha.tolist()},
        "iters": args.iters,
        "burnin": args.burnin,
        "thin": args.thin,
        "chains": args.chains,
        "restarts": args.restarts,
        "seed": args.seed,
        "seed_streams": {"restarts": 0, "chain_c": "c + 1"},
        "drop_isolated": args.drop_isolated,
        "inputs": inputs,
        "init": {"log_post": init.log_post, "restart_log_posts": init.stats.get("restart_log_posts", [])},
        "chain_stats": chain_meta,
        "psrf": psrf,
        "versions": _versions(),
    }
    write_trace_dir(args.out, graph, traces, init.sigma, metadata)
    # timing varies run to run, so it stays out of the reproducible files
    _emit({"out": str(args.out), "samples": int(sum(len(t) for t in traces)),
           "seconds": round(elapsed, 3), "psrf_log_post": psrf.get("log_post")})
    return EXIT_OK


def cmd_estimate(args) -> int:
    from .estimators import (binder_estimate, centroid_estimate, eta_degree_diagnostic,
                             expected_binder_risk, expected_hamming_risk, gamma_credible_interval,
                             map_estimate)
    from .gibbs import ChainState, ModelParams
    from .labels import binder, gamma_pairs
    from .traceio import read_trace_dir, write_json

    trace, tokens, degree, meta = read_trace_dir(args.trace_dir)
    out = Path(args.out or args.trace_dir)
    out.mkdir(parents=True, exist_ok=True)
    K = trace.K
    if args.estimator == "centroid":
        labels = centroid_estimate(trace)
    elif args.estimator == "binder":
        labels = binder_estimate(trace)
    else:
        mode_state = None
        init_path = Path(args.trace_dir) / "init_labels.txt"
        lp = meta.get("init", {}).get("log_post")
        if init_path.is_file() and lp is not None:
            from .graph import load_labels

            sigma = load_labels(init_path, _TokenGraph(tokens))
            mode_state = ChainState(sigma, ModelParams(np.zeros(0), np.zeros(0), np.zeros(0)), float(lp))
        labels = map_estimate(trace, mode_state=mode_state)

    with open(out / f"labels_{args.estimator}.txt", "w", encoding="utf-8") as fh:
        for tok, lab in zip(tokens, labels):
            fh.write(f"{tok} {int(lab)}\n")

    ci = gamma_credible_interval(trace, args.level)
    with open(out / "gamma_intervals.csv", "w", encoding="utf-8") as fh:
        fh.write("pair,mean,lo,hi,level\n")
        for (k, l), row, mean in zip(gamma_pairs(K), ci, trace.gamma.mean(axis=0)):
            fh.write(f"{k}-{l},{mean:.17g},{row[0]:.17g},{row[1]:.17g},{args.level:.17g}\n")

    class _G:  # degree and size are all the diagnostic needs
        pass

    g = _G()
    g.n, g.degree = len(tokens), degree
    diag = eta_degree_diagnostic(trace, g)
    with open(out / "eta_degree.csv", "w", encoding="utf-8") as fh:
        fh.write("node,token,degree,eta_mean,logit_degree,flagged\n")
        for i, tok in enumerate(tokens):
            fh.write(f"{i},{tok},{int(degree[i])},{diag.eta_mean[i]:.17g},"
                     f"{diag.logit_degree[i]:.17g},{int(diag.flagged[i])}\n")

    centroid = centroid_estimate(trace)
    risks = expected_binder_risk(np.vstack([labels, centroid]), trace)
    summary = {
        "estimator": args.estimator,
        "samples": len(trace),
        "K": K,
        "community_sizes": np.bincount(labels, minlength=K + 1)[1:].tolist(),
        "expected_hamming_risk": expected_hamming_risk(labels, trace),
        "expected_binder_risk": float(risks[0]),
        "centroid_expected_binder_risk": float(risks[1]),
        "gamma_level": args.level,
        "eta_degree_correlation": diag.correlation,
    }

    if args.distances:
        uniq, first = np.unique(trace.sigma, axis=0, return_index=True)
        uniq = uniq[np.argsort(first)][: args.max_distinct]
        with open(out / "sample_distances.csv", "w", encoding="utf-8") as fh:
            fh.write("i,j,binder\n")
            for i in range(len(uniq)):
                for j in range(i + 1, len(uniq)):
                    fh.write(f"{i},{j},{binder(uniq[i], uniq[j])}\n")
        summary["distinct_samples_in_distances"] = int(len(uniq))
    write_json(summary, out / "summary.json")
    _emit(summary)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .graph import load_labels
    from .labels import error_rate, q_error_interval

    if (args.estimate is None) == (args.runs_glob is None):
        raise UsageError("give exactly one of --estimate or --runs-glob")
    if args.graph is not None:
        from .graph import load_edge_list

        frame = _load_graph(args.graph, False)
        frame = _TokenGraph(frame.tokens)
    else:
        frame = _TokenGraph(_label_tokens(args.reference))
    reference = load_labels(args.reference, frame)

    def _rate(path):
        try:
            est = load_labels(path, frame)
        except DataError as exc:
            raise DataError(f"{path}: node sets do not match ({exc})") from None
        return error_rate(est, reference)

    if args.estimate is not None:
        rate = _rate(args.estimate)
        _emit({"error_rate": rate})
        return EXIT_OK
    paths = sorted(glob.glob(args.runs_glob))
    if not paths:
        raise DataError(f"no files match {args.runs_glob!r}")
    rates = [_rate(p) for p in paths]
    lo, hi = q_error_interval(rates, args.q)
    _emit({"runs": len(rates), "q": args.q, "interval": [lo, hi], "rates": rates})
    return EXIT_OK


_COMMANDS = {"generate": cmd_generate, "fit": cmd_fit, "estimate": cmd_estimate, "evaluate": cmd_evaluate}


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    try:
        _apply_env(parser, os.environ if environ is None else environ)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"logitsbm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"logitsbm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"logitsbm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"logitsbm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
