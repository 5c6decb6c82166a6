"""Degree-weighted transition scores and max-aggregation over walker swarms."""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence, TextIO

import numpy as np

from .graph import Graph
from .walks import (
    Propagator,
    SamplerSpec,
    build_generator,
    diagonalize,
    sample_generator,
    transition_matrix,
)

MAGIC = b"CQWSCORE"
FORMAT_VERSION = 1
# magic, version, dtype code, n, t, walkers, seed, count, method id length
_HEADER = struct.Struct("<8sIBQdIQQH")


@dataclass(frozen=True, eq=False)
class ScoreTable:
    """Scores over the non-edges of ``graph``, aligned with ``graph.non_edges``."""

    graph: Graph
    values: np.ndarray
    method: str = ""
    t: float = float("nan")
    walkers: int = 0
    seed: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (len(self.graph.non_edges[0]),):
            raise ValueError("values must have one entry per non-edge")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def rows(self) -> np.ndarray:
        return self.graph.non_edges[0]

    @property
    def cols(self) -> np.ndarray:
        return self.graph.non_edges[1]

    def __len__(self):
        return len(self.values)

    def ranking(self) -> np.ndarray:
        """Positions into ``values`` by descending score, ties by ``(row, col)``."""
        # non_edges are already row-major, so a stable sort keeps (u, v) order on ties
        return np.argsort(-self.values, kind="stable")

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(int(u), int(v)): float(s) for u, v, s in zip(self.rows, self.cols, self.values)}

    def top(self, k: int | None = None) -> list[tuple[str, str, float]]:
        order = self.ranking()
        if k is not None:
            order = order[:k]
        lab = self.graph.labels
        return [(lab[self.rows[i]], lab[self.cols[i]], float(self.values[i])) for i in order]

    def write_top(self, dest: TextIO | str | os.PathLike, k: int | None = None) -> None:
        text = "".join(f"{a}\t{b}\t{s!r}\n" for a, b, s in self.top(k))
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            dest.write(text)

    def save(self, path: str | os.PathLike, single: bool = False) -> None:
        """Binary dump: fixed header, method id, packed upper-triangular values."""
        vals = self.values.astype("<f4" if single else "<f8")
        mid = self.method.encode("utf-8")
        head = _HEADER.pack(
            MAGIC, FORMAT_VERSION, 4 if single else 8, self.graph.n,
            float(self.t), int(self.walkers), int(self.seed), len(vals), len(mid),
        )
        with open(path, "wb") as fh:
            fh.write(head)
            fh.write(mid)
            fh.write(vals.tobytes())

    @classmethod
    def load(cls, path: str | os.PathLike, graph: Graph) -> "ScoreTable":
        with open(path, "rb") as fh:
            raw = fh.read()
        magic, version, width, n, t, walkers, seed, count, mlen = _HEADER.unpack_from(raw)
        if magic != MAGIC or version != FORMAT_VERSION:
            raise ValueError(f"{path}: not a score table (v{FORMAT_VERSION})")
        if n != graph.n or count != len(graph.non_edges[0]):
            raise ValueError(f"{path}: table does not match graph dimensions")
        off = _HEADER.size
        method = raw[off:off + mlen].decode("utf-8")
        dtype = "<f4" if width == 4 else "<f8"
        vals = np.frombuffer(raw, dtype=dtype, count=count, offset=off + mlen)
        return cls(graph, vals.astype(np.float64), method, t, walkers, seed)


def _pair_scores(prob: np.ndarray, g: Graph) -> np.ndarray:
    rows, cols = g.non_edges
    d = g.degree
    return prob[rows, cols] * (d[rows] + d[cols])


def score_single(p: Propagator, g: Graph, t: float, method: str = "qw") -> ScoreTable:
    """``S(j, k) = P_jk(t) * (d_j + d_k)`` for every non-edge ``j < k``."""
    if p.n != g.n:
        raise ValueError(f"propagator has dimension {p.n}, graph has {g.n} nodes")
    return ScoreTable(g, _pair_scores(transition_matrix(p, t), g), method, t, 1)


def swarm_method_id(kind: str | None, walkers: int, include_nonchiral: bool) -> str:
    if not walkers:
        return "qw-nc"
    return f"qw-{kind}-M{walkers}" + ("-tot" if include_nonchiral else "-c")


def _walker_scores(g: Graph, spec: SamplerSpec | None, times: Sequence[float]) -> list[np.ndarray]:
    gen = build_generator(g) if spec is None else sample_generator(g, spec)
    p = diagonalize(gen)
    return [_pair_scores(transition_matrix(p, t), g) for t in times]


def iter_walker_scores(
    g: Graph,
    sampler: SamplerSpec,
    walkers: Sequence[int],
    times: Sequence[float],
    workers: int = 1,
) -> Iterator[tuple[int, list[np.ndarray]]]:
    """Yield ``(m, per-time scores)`` for each walker index in order.

    Walker ``0`` is the non-chiral walk; ``m >= 1`` uses stream ``seed ^ m``.
    At most ``workers`` walkers are in flight at once.
    """
    def job(m):
        return m, _walker_scores(g, None if m == 0 else sampler.walker(m), times)

    walkers = list(walkers)
    if workers <= 1:
        for m in walkers:
            yield job(m)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i in range(0, len(walkers), workers):
            yield from pool.map(job, walkers[i:i + workers])


def swarm_scores_over_time(
    g: Graph,
    sampler: SamplerSpec | None,
    walkers: int,
    times: Sequence[float],
    include_nonchiral: bool = True,
    workers: int = 1,
) -> list[ScoreTable]:
    """Swarm tables at several times, diagonalizing each walker once."""
    if walkers < 0:
        raise ValueError("walker count must be non-negative")
    if walkers == 0 and not include_nonchiral:
        raise ValueError("empty swarm: need walkers > 0 or include_nonchiral")
    if walkers > 0 and sampler is None:
        raise ValueError("chiral walkers need a sampler")
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise ValueError("times must be non-negative")
    ids = ([0] if include_nonchiral else []) + list(range(1, walkers + 1))
    best: list[np.ndarray] | None = None
    for _, scores in iter_walker_scores(g, sampler or SamplerSpec("uniform_full"), ids, times, workers):
        if best is None:
            best = scores
        else:
            for acc, s in zip(best, scores):
                np.maximum(acc, s, out=acc)
    method = swarm_method_id(sampler.kind if sampler else None, walkers, include_nonchiral)
    seed = sampler.seed if sampler else 0
    return [ScoreTable(g, b, method, t, walkers, seed) for b, t in zip(best, times)]


def swarm_score(
    g: Graph,
    sampler: SamplerSpec | None,
    walkers: int,
    t: float,
    include_nonchiral: bool = True,
    workers: int = 1,
) -> ScoreTable:
    """Entrywise max of walker scores: chiral walkers only, or together with the nc walk."""
    return swarm_scores_over_time(g, sampler, walkers, [t], include_nonchiral, workers)[0]


def swarm_size_prefixes(
    g: Graph,
    sampler: SamplerSpec,
    sizes: Sequence[int],
    t: float,
    workers: int = 1,
) -> dict[bool, dict[int, ScoreTable]]:
    """Chiral-only and nc-including swarm tables for every size in ``sizes``.

    Walker ``m`` is shared by every swarm with at least ``m`` walkers, so the
    whole sweep costs ``max(sizes) + 1`` diagonalizations.
    """
    sizes = sorted(set(int(s) for s in sizes))
    if not sizes or sizes[0] < 0:
        raise ValueError("swarm sizes must be non-negative")
    wanted = set(sizes)
    out: dict[bool, dict[int, ScoreTable]] = {False: {}, True: {}}
    nc = None
    run = None
    for m, (scores,) in iter_walker_scores(g, sampler, range(0, sizes[-1] + 1), [t], workers):
        if m == 0:
            nc = scores
        else:
            run = scores.copy() if run is None else np.maximum(run, scores, out=run)
        if m in wanted:
            for with_nc in (False, True):
                if m == 0 and not with_nc:
                    continue
                vals = nc if run is None else (np.maximum(run, nc) if with_nc else run.copy())
                out[with_nc][m] = ScoreTable(
                    g, vals, swarm_method_id(sampler.kind, m, with_nc), t, m, sampler.seed
                )
    return out
