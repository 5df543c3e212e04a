"""Directory layout for sampler output.

A trace directory holds::

    metadata.json          run settings, seeds, versions, input hash, PSRF
    nodes.csv              node, token, degree
    init_labels.txt        starting labels (token label)
    chain<c>_trace.csv     iteration, log_post, gamma_k_l..., pi_k...
    chain<c>_sigma.csv     iteration, one column per node
    chain<c>_eta.csv       iteration, one column per node
    marginal_counts.csv    node, count_1 ... count_K (all chains)

Floats are written with 17 significant digits so that files round-trip
exactly and identical runs give identical bytes.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .exceptions import DataError
from .gibbs import SampleTrace
from .labels import gamma_pairs

__all__ = ["file_digest", "write_trace_dir", "read_trace_dir", "write_json"]

_FMT = ".17g"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(v):
    return format(float(v), _FMT)


def write_trace_dir(out, graph, traces, init_sigma, metadata: dict) -> Path:
    """Write per-chain traces plus pooled marginal counts under ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    K = traces[0].K
    _write_rows(out / "nodes.csv", ["node", "token", "degree"],
                ([i, tok, int(d)] for i, (tok, d) in enumerate(zip(graph.tokens, graph.degree))))
    with open(out / "init_labels.txt", "w", encoding="utf-8") as fh:
        for tok, lab in zip(graph.tokens, init_sigma):
            fh.write(f"{tok} {int(lab)}\n")
    g_cols = [f"gamma_{k}_{l}" for k, l in gamma_pairs(K)]
    p_cols = [f"pi_{k}" for k in range(1, K + 1)]
    node_cols = [f"n{i}" for i in range(graph.n)]
    for tr in traces:
        c = int(tr.chain[0]) if len(tr) else int(tr.meta.get("chain", 0))
        _write_rows(out / f"chain{c}_trace.csv", ["iteration", "log_post", *g_cols, *p_cols],
                    ([int(it), _fmt(lp), *map(_fmt, g), *map(_fmt, p)]
                     for it, lp, g, p in zip(tr.iteration, tr.log_post, tr.gamma, tr.pi)))
        _write_rows(out / f"chain{c}_sigma.csv", ["iteration", *node_cols],
                    ([int(it), *s.tolist()] for it, s in zip(tr.iteration, tr.sigma)))
        _write_rows(out / f"chain{c}_eta.csv", ["iteration", *node_cols],
                    ([int(it), *map(_fmt, e)] for it, e in zip(tr.iteration, tr.eta)))
    counts = sum(tr.marginal_counts for tr in traces)
    _write_rows(out / "marginal_counts.csv", ["node", *[f"count_{k}" for k in range(1, K + 1)]],
                ([i, *row.tolist()] for i, row in enumerate(counts)))
    write_json(metadata, out / "metadata.json")
    return out


def _read_matrix(path, dtype):
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=dtype, ndmin=2)
    return data


def read_trace_dir(path):
    """Load a trace directory.

    Returns
    -------
    trace : SampleTrace
        All chains pooled.
    tokens : list of str
        Node tokens in node order.
    degree : ndarray
    metadata : dict
    """
    path = Path(path)
    meta_path = path / "metadata.json"
    if not meta_path.is_file():
        raise DataError(f"{path}: not a trace directory (metadata.json missing)")
    with open(meta_path, encoding="utf-8") as fh:
        metadata = json.load(fh)
    with open(path / "nodes.csv", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    tokens = [r[1] for r in rows]
    degree = np.array([int(r[2]) for r in rows], dtype=np.int64)
    K = int(metadata["K"])
    n_g = K * (K - 1) // 2
    chains = sorted(int(p.name[5:-10]) for p in path.glob("chain*_trace.csv"))
    if not chains:
        raise DataError(f"{path}: no chain traces")
    parts = []
    for c in chains:
        tr = _read_matrix(path / f"chain{c}_trace.csv", float)
        sig = _read_matrix(path / f"chain{c}_sigma.csv", np.int64)
        eta = _read_matrix(path / f"chain{c}_eta.csv", float)
        if tr.shape[0] == 0 or tr.shape[1] == 0:
            continue
        sigma = sig[:, 1:]
        counts = np.zeros((len(tokens), K), dtype=np.int64)
        for k in range(K):
            counts[:, k] = (sigma == k + 1).sum(axis=0)
        parts.append(SampleTrace(
            sigma=sigma, gamma=tr[:, 2:2 + n_g], eta=eta[:, 1:], pi=tr[:, 2 + n_g:],
            log_post=tr[:, 1], iteration=tr[:, 0].astype(np.int64),
            chain=np.full(len(tr), c), marginal_counts=counts,
        ))
    if not parts or sum(len(p) for p in parts) == 0:
        raise DataError(f"{path}: trace is empty")
    trace = SampleTrace.pooled(parts)
    if trace.sigma.shape[1] != len(tokens):
        raise DataError(f"{path}: node count mismatch between nodes.csv and traces")
    return trace, tokens, degree, metadata
