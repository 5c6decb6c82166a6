"""Undirected simple graphs: edge-list ingestion, canonicalization and summary statistics."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, fields
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components


class EdgeListError(ValueError):
    """Raised for malformed edge-list input."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on nodes ``0..n-1``.

    ``edges`` holds each unordered pair once as ``(u, v)`` with ``u < v``,
    sorted lexicographically. ``self_loops`` lists nodes that carried a loop
    in the source data; loops never enter ``edges`` and are dropped by
    :func:`canonicalize`.
    """

    labels: tuple[str, ...]
    edges: np.ndarray
    self_loops: tuple[int, ...] = ()

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        edges.flags.writeable = False
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, labels: Sequence[str], pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from index pairs in any orientation, collapsing duplicates."""
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        n = len(labels)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint out of range")
        loops = arr[:, 0] == arr[:, 1]
        self_loops = tuple(int(x) for x in np.unique(arr[loops, 0]))
        arr = np.sort(arr[~loops], axis=1)
        arr = np.unique(arr, axis=0) if len(arr) else arr
        return cls(tuple(labels), arr, self_loops)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degree(self) -> np.ndarray:
        d = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        d.flags.writeable = False
        return d

    def adjacency(self, sparse: bool = False):
        """0/1 adjacency matrix, dense float64 by default."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        a = sp.coo_matrix(
            (np.ones(2 * len(u)), (np.concatenate([u, v]), np.concatenate([v, u]))),
            shape=(self.n, self.n),
        ).tocsr()
        return a if sparse else a.toarray()

    @cached_property
    def non_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column indices of all pairs ``j < k`` not joined by an edge, row-major."""
        mask = np.triu(np.ones((self.n, self.n), dtype=bool), k=1)
        mask[self.edges[:, 0], self.edges[:, 1]] = False
        rows, cols = np.nonzero(mask)
        rows.flags.writeable = False
        cols.flags.writeable = False
        return rows, cols

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def index_of(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.self_loops == other.self_loops
            and np.array_equal(self.edges, other.edges)
        )

    def __hash__(self):
        return hash((self.labels, self.edges.tobytes(), self.self_loops))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges}, self_loops={len(self.self_loops)})"


@dataclass(frozen=True)
class GraphStats:
    num_nodes: int
    num_edges: int
    mean_degree: float
    density: float
    mean_clustering: float


def parse_edge_list(
    source: TextIO | str | os.PathLike,
    delimiter: str | None = None,
    comment: str = "#",
    columns: tuple[int, int] = (0, 1),
    skip_header: int = 0,
) -> Graph:
    """Read an edge list into a :class:`Graph`.

    ``delimiter=None`` splits on any run of whitespace; pass ``"\\t"`` for
    TSV exports whose identifiers may contain spaces. Node indices follow
    sorted label order, so the result does not depend on line order.
    Self-loops are kept in ``Graph.self_loops`` until :func:`canonicalize`.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return parse_edge_list(fh, delimiter, comment, columns, skip_header)

    need = max(columns) + 1
    raw: list[tuple[str, str]] = []
    for lineno, line in enumerate(source, start=1):
        if lineno <= skip_header:
            continue
        line = line.rstrip("\r\n")
        if not line.strip() or (comment and line.lstrip().startswith(comment)):
            continue
        tokens = line.split(delimiter)
        if len(tokens) < need:
            raise EdgeListError(f"line {lineno}: expected at least {need} columns, got {len(tokens)}")
        a, b = tokens[columns[0]].strip(), tokens[columns[1]].strip()
        if not a or not b:
            raise EdgeListError(f"line {lineno}: empty node label")
        raw.append((a, b))

    labels = sorted({x for pair in raw for x in pair})
    index = {lab: i for i, lab in enumerate(labels)}
    return Graph.from_pairs(labels, ((index[a], index[b]) for a, b in raw))


def parse_edge_text(text: str, **options) -> Graph:
    return parse_edge_list(io.StringIO(text), **options)


def subgraph(g: Graph, nodes: Sequence[int]) -> Graph:
    """Induced subgraph on ``nodes``, reindexed by ascending old index."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[nodes] = np.arange(len(nodes))
    keep = (remap[g.edges[:, 0]] >= 0) & (remap[g.edges[:, 1]] >= 0)
    loops = tuple(int(remap[x]) for x in g.self_loops if remap[x] >= 0)
    return Graph(tuple(g.labels[i] for i in nodes), remap[g.edges[keep]], loops)


def canonicalize(g: Graph) -> Graph:
    """Drop self-loops and keep the largest connected component.

    Ties between equally large components go to the one containing the
    smallest node index.
    """
    if g.n == 0:
        return Graph((), np.empty((0, 2), dtype=np.int64))
    _, comp = connected_components(g.adjacency(sparse=True), directed=False)
    sizes = np.bincount(comp)
    first = np.full(len(sizes), g.n)
    np.minimum.at(first, comp, np.arange(g.n))
    largest = np.flatnonzero(sizes == sizes.max())
    best = int(largest[np.argmin(first[largest])])
    h = subgraph(g, np.flatnonzero(comp == best))
    return Graph(h.labels, h.edges, ())


def compute_stats(g: Graph) -> GraphStats:
    n, m = g.n, g.num_edges
    d = g.degree.astype(float)
    a = g.adjacency(sparse=True)
    # triangles through each node: diag(A^3) / 2
    tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        local = np.where(d > 1, 2.0 * tri / (d * (d - 1)), 0.0)
    return GraphStats(
        num_nodes=n,
        num_edges=m,
        mean_degree=2.0 * m / n if n else 0.0,
        density=2.0 * m / (n * (n - 1)) if n > 1 else 0.0,
        mean_clustering=float(local.mean()) if n else 0.0,
    )


def normalize_stats(stats: Sequence[GraphStats]) -> list[dict[str, float]]:
    """Divide every field by its maximum over ``stats`` (radar-chart scaling)."""
    if not stats:
        raise ValueError("need at least one GraphStats record")
    names = [f.name for f in fields(GraphStats)]
    table = np.array([[float(getattr(s, k)) for k in names] for s in stats])
    peak = table.max(axis=0)
    if np.any(peak <= 0):
        bad = [k for k, p in zip(names, peak) if p <= 0]
        raise ValueError(f"cannot normalize fields with non-positive maximum: {bad}")
    return [dict(zip(names, (row / peak).tolist())) for row in table]


def write_edge_list(g: Graph, dest: TextIO | str | os.PathLike) -> None:
    """Write ``label_u<TAB>label_v`` lines with ``label_u < label_v``, sorted."""
    lines = sorted(
        tuple(sorted((g.labels[u], g.labels[v]))) for u, v in g.edges
    )
    text = "".join(f"{a}\t{b}\n" for a, b in lines)
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)
