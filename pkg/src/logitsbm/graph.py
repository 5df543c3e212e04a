"""Undirected simple graphs and their text formats.

Edge lists hold one pair of node tokens per line, separated by whitespace;
lines starting with ``#`` are comments.  Label files hold ``token label``
pairs.  Tokens are arbitrary strings and nodes are numbered ``0..n-1`` in
order of first appearance.
"""
from __future__ import annotations

import io
import os
import re
import sys
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np

from .exceptions import DataError

__all__ = [
    "Graph",
    "load_edge_list",
    "load_labels",
    "load_gml",
    "write_edge_list",
    "write_labels",
]


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph stored as sorted adjacency lists.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : ndarray, shape (m, 2)
        Unique pairs ``(i, j)`` with ``i < j``, sorted lexicographically.
    tokens : tuple of str
        Original node identifiers, ``tokens[i]`` naming node ``i``.
    """

    n: int
    edges: np.ndarray
    tokens: tuple[str, ...] = field(default=())

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        if not self.tokens:
            object.__setattr__(self, "tokens", tuple(str(i) for i in range(self.n)))
        if len(self.tokens) != self.n:
            raise DataError("token map does not cover all nodes")

    @classmethod
    def from_edges(cls, n: int, pairs, tokens: Sequence[str] = ()) -> "Graph":
        """Build a graph from arbitrary pairs, dropping loops and duplicates."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise DataError("edge endpoint out of range")
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        pairs = np.sort(pairs, axis=1)
        pairs = np.unique(pairs, axis=0) if len(pairs) else pairs.reshape(0, 2)
        return cls(n, pairs, tuple(tokens))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def _csr(self):
        both = np.concatenate([self.edges, self.edges[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, both[:, 0] + 1, 1)
        np.cumsum(indptr, out=indptr)
        indices = both[:, 1].copy()
        indices.setflags(write=False)
        indptr.setflags(write=False)
        return indptr, indices

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.diff(self._csr[0])
        deg.setflags(write=False)
        return deg

    def neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self._csr
        return indices[indptr[i]:indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        nb = self.neighbors(i)
        k = np.searchsorted(nb, j)
        return bool(k < len(nb) and nb[k] == j)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 matrix (uint8).  O(n^2) memory."""
        a = np.zeros((self.n, self.n), dtype=np.uint8)
        a[self.edges[:, 0], self.edges[:, 1]] = 1
        a[self.edges[:, 1], self.edges[:, 0]] = 1
        a.setflags(write=False)
        return a

    def index_of(self, token: str) -> int:
        return self._token_index[token]

    @cached_property
    def _token_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tokens)}

    def subgraph(self, keep) -> "Graph":
        """Induced subgraph on the boolean mask or index array ``keep``."""
        keep = np.asarray(keep)
        if keep.dtype == bool:
            keep = np.flatnonzero(keep)
        new_id = np.full(self.n, -1, dtype=np.int64)
        new_id[keep] = np.arange(len(keep))
        e = new_id[self.edges]
        e = e[(e >= 0).all(axis=1)]
        return Graph.from_edges(len(keep), e, [self.tokens[k] for k in keep])

    def largest_component(self) -> tuple["Graph", np.ndarray]:
        """Induced subgraph on the largest connected component, and its node mask."""
        from scipy.sparse import csr_matrix
        from scipy.sparse.csgraph import connected_components

        indptr, indices = self._csr
        mat = csr_matrix((np.ones(len(indices)), indices, indptr), shape=(self.n, self.n))
        _, comp = connected_components(mat, directed=False)
        keep = comp == np.argmax(np.bincount(comp))
        return self.subgraph(keep), keep

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _open_text(source) -> tuple[TextIO, bool]:
    if source is None or source == "-":
        return sys.stdin, False
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8"), True
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return source, False
    # any other iterable of lines
    return io.StringIO("\n".join(source)), False


def _data_lines(stream: Iterable[str]):
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def load_edge_list(source, drop_isolated: bool = False) -> Graph:
    """Read an undirected edge list.

    ``source`` may be a path, ``"-"``/``None`` for standard input, an open
    text stream, or an iterable of lines.  Self-loops and repeated edges
    are dropped (a warning reports how many).  With ``drop_isolated`` any
    node left without edges is removed and ids are recompacted.
    """
    stream, close = _open_text(source)
    tokens: dict[str, int] = {}
    pairs = []
    try:
        for lineno, parts in _data_lines(stream):
            if len(parts) != 2:
                raise DataError(f"line {lineno}: expected 2 tokens, got {len(parts)}")
            ids = []
            for tok in parts:
                if tok not in tokens:
                    tokens[tok] = len(tokens)
                ids.append(tokens[tok])
            pairs.append(ids)
    finally:
        if close:
            stream.close()

    raw = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    loops = int((raw[:, 0] == raw[:, 1]).sum())
    graph = Graph.from_edges(len(tokens), raw, list(tokens))
    dups = len(raw) - loops - graph.m
    if loops or dups:
        warnings.warn(f"dropped {loops} self-loops and {dups} duplicate edges", stacklevel=2)
    if drop_isolated:
        graph = graph.subgraph(graph.degree > 0)
    if graph.n == 0 or graph.m == 0:
        raise DataError("empty graph after cleaning")
    return graph


def load_labels(source, graph: Graph) -> np.ndarray:
    """Read ``token label`` lines into a label vector aligned with ``graph``.

    Labels are recoded to ``1..K`` in order of first appearance in the file.
    """
    stream, close = _open_text(source)
    labels = np.zeros(graph.n, dtype=np.int64)
    code: dict[int, int] = {}
    try:
        for lineno, parts in _data_lines(stream):
            if len(parts) != 2:
                raise DataError(f"line {lineno}: expected 'token label'")
            tok, lab = parts
            if tok not in graph._token_index:
                raise DataError(f"line {lineno}: node {tok!r} not in graph")
            try:
                lab = int(lab)
            except ValueError:
                raise DataError(f"line {lineno}: label {lab!r} is not an integer") from None
            if lab < 1:
                raise DataError(f"line {lineno}: labels must be >= 1")
            new = code.setdefault(lab, len(code) + 1)
            i = graph._token_index[tok]
            if labels[i] and labels[i] != new:
                raise DataError(f"line {lineno}: conflicting label for {tok!r}")
            labels[i] = new
    finally:
        if close:
            stream.close()
    missing = np.flatnonzero(labels == 0)
    if len(missing):
        raise DataError(f"missing nodes: {len(missing)} nodes have no label")
    if len(code) < 2:
        raise DataError("label file defines fewer than 2 communities")
    return labels


_GML_TOKEN = re.compile(r'"[^"]*"|\[|\]|[^\s\[\]]+')


def load_gml(source, label_key: str = "value", drop_isolated: bool = True):
    """Read a GML network (e.g. the political blogs file).

    Edge direction and multiplicity are discarded.  Returns ``(graph,
    labels)`` where labels come from the node attribute ``label_key``
    (``None`` when absent), recoded by first appearance.
    """
    stream, close = _open_text(source)
    try:
        text = stream.read()
    finally:
        if close:
            stream.close()
    toks = _GML_TOKEN.findall(text)

    def parse_block(pos):
        out = []
        while pos < len(toks):
            t = toks[pos]
            if t == "]":
                return out, pos + 1
            key = t
            val = toks[pos + 1]
            if val == "[":
                sub, pos = parse_block(pos + 2)
                out.append((key, sub))
            else:
                out.append((key, val.strip('"')))
                pos += 2
        return out, pos

    tree, _ = parse_block(0)
    graph_items = next((v for k, v in tree if k == "graph"), tree)
    ids, attrs, pairs = [], [], []
    for key, val in graph_items:
        if key == "node":
            d = dict(val)
            ids.append(d["id"])
            attrs.append(d.get(label_key))
        elif key == "edge":
            d = dict(val)
            pairs.append((d["source"], d["target"]))
    index = {t: i for i, t in enumerate(ids)}
    edges = [(index[s], index[t]) for s, t in pairs]
    graph = Graph.from_edges(len(ids), edges, ids)
    labels = None
    if all(a is not None for a in attrs):
        code: dict[str, int] = {}
        labels = np.array([code.setdefault(a, len(code) + 1) for a in attrs], dtype=np.int64)
    if drop_isolated:
        keep = graph.degree > 0
        graph = graph.subgraph(keep)
        if labels is not None:
            labels = labels[keep]
    return graph, labels


def write_edge_list(graph: Graph, dest) -> None:
    """Write ``graph`` as a token edge list to a path or text stream."""
    close = False
    if isinstance(dest, (str, os.PathLike)):
        dest, close = open(dest, "w", encoding="utf-8"), True
    try:
        for i, j in graph.edges:
            dest.write(f"{graph.tokens[i]} {graph.tokens[j]}\n")
    finally:
        if close:
            dest.close()


def write_labels(labels, graph: Graph, dest) -> None:
    close = False
    if isinstance(dest, (str, os.PathLike)):
        dest, close = open(dest, "w", encoding="utf-8"), True
    try:
        for tok, lab in zip(graph.tokens, np.asarray(labels)):
            dest.write(f"{tok} {int(lab)}\n")
    finally:
        if close:
            dest.close()
