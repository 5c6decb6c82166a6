"""Chiral Hamiltonians, phase samplers and continuous-time walk propagation."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import TextIO

import numpy as np
import scipy.linalg as la

from .graph import Graph

SAMPLERS = ("uniform_full", "quarter_pi_balanced", "eighth_pi")

SAMPLER_ALIASES = {
    "uniform": "uniform_full",
    "pi": "uniform_full",
    "pi2": "quarter_pi_balanced",
    "pi/2": "quarter_pi_balanced",
    "pi8": "eighth_pi",
    "pi/8": "eighth_pi",
}

MAX_BALANCE_PASSES = 10


def sampler_kind(name: str) -> str:
    kind = SAMPLER_ALIASES.get(name, name)
    if kind not in SAMPLERS:
        raise ValueError(f"unknown sampler {name!r}; expected one of {SAMPLERS}")
    return kind


@dataclass(frozen=True)
class SamplerSpec:
    kind: str
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", sampler_kind(self.kind))
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a non-negative 64-bit integer")

    def walker(self, m: int) -> "SamplerSpec":
        """Stream for the ``m``-th walker of a swarm (``seed XOR m``)."""
        return SamplerSpec(self.kind, self.seed ^ m)


@dataclass(frozen=True, eq=False)
class ChiralGenerator:
    """Hamiltonian with entry ``exp(i*phase)`` on each edge ``(u, v)``, ``u < v``.

    The ``(v, u)`` entry is the complex conjugate, so the matrix is Hermitian
    by construction. All-zero phases give the adjacency matrix.
    """

    graph: Graph
    phases: np.ndarray
    name: str = "nc"

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=float)
        ph.flags.writeable = False
        object.__setattr__(self, "phases", ph)

    @property
    def is_chiral(self) -> bool:
        return bool(np.any(self.phases != 0.0))

    def phase(self, j: int, k: int) -> float:
        """Oriented phase of the ``j -> k`` entry; antisymmetric in its arguments."""
        u, v = min(j, k), max(j, k)
        hit = np.flatnonzero((self.graph.edges[:, 0] == u) & (self.graph.edges[:, 1] == v))
        if not len(hit):
            raise KeyError(f"({j}, {k}) is not an edge")
        ph = float(self.phases[hit[0]])
        return ph if j < k else -ph

    def matrix(self) -> np.ndarray:
        n = self.graph.n
        u, v = self.graph.edges[:, 0], self.graph.edges[:, 1]
        if not self.is_chiral:
            h = np.zeros((n, n))
            h[u, v] = 1.0
            h[v, u] = 1.0
            return h
        w = np.exp(1j * self.phases)
        h = np.zeros((n, n), dtype=complex)
        h[u, v] = w
        h[v, u] = w.conj()
        return h


def build_generator(g: Graph, phases=None, name: str | None = None) -> ChiralGenerator:
    if phases is None:
        return ChiralGenerator(g, np.zeros(g.num_edges), name or "nc")
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (g.num_edges,):
        raise ValueError(f"expected {g.num_edges} phases, got shape {phases.shape}")
    return ChiralGenerator(g, phases, name or "chiral")


def row_imbalance(g: Graph, phases: np.ndarray) -> float:
    """Sum over nodes of the absolute sum of oriented phases leaving the node."""
    r = np.zeros(g.n)
    np.add.at(r, g.edges[:, 0], phases)
    np.add.at(r, g.edges[:, 1], -phases)
    return float(np.abs(r).sum())


def _balance_quarter_turns(edges: np.ndarray, n: int, q: np.ndarray) -> np.ndarray:
    """Greedy local search lowering sum_j |sum_k q_jk| over reassignments of ``q``.

    ``q`` holds oriented phases in units of pi/2. At each edge the best of
    (a) reversing its orientation and (b) swapping its value with another
    edge, under any orientation of both, is applied if it strictly lowers the
    objective. Integer arithmetic keeps the search exact.
    """
    q = q.astype(np.int64).copy()
    m = len(q)
    if m == 0:
        return q
    x, y = edges[:, 0], edges[:, 1]
    r = np.zeros(n, dtype=np.int64)
    np.add.at(r, x, q)
    np.add.at(r, y, -q)
    # edge ids incident to each node
    ends = np.concatenate([x, y])
    by_node = np.argsort(ends, kind="stable")
    start = np.searchsorted(ends[by_node], np.arange(n + 1))
    eid = by_node % m
    worst = np.iinfo(np.int64).max
    # the four orientation choices (se for the edge, sf for its partner), as columns
    se = np.array([1, 1, -1, -1])[:, None]
    sf = np.array([1, -1, 1, -1])[:, None]
    vals = np.arange(-2, 3)

    def adjacent_gain(f, u, v, a):
        # exact objective change when f shares an endpoint with (u, v)
        b = q[f]
        d0, d2 = se * b - a, sf * a - b
        xf, yf = x[f], y[f]
        xu, xv, yu, yv = xf == u, xf == v, yf == u, yf == v
        x_free, y_free = ~(xu | xv), ~(yu | yv)
        rx, ry = r[xf], r[yf]
        return (
            np.abs(r[u] + d0 + d2 * xu - d2 * yu) - abs(r[u])
            + np.abs(r[v] - d0 + d2 * xv - d2 * yv) - abs(r[v])
            + (np.abs(rx + d2 + d0 * xu - d0 * xv) - np.abs(rx)) * x_free
            + (np.abs(ry - d2 + d0 * yu - d0 * yv) - np.abs(ry)) * y_free
        )

    for _ in range(MAX_BALANCE_PASSES):
        improved = False
        for e in range(m):
            u, v, a = x[e], y[e], q[e]
            ru, rv = r[u], r[v]
            base_uv = abs(ru) + abs(rv)
            flip_gain = abs(ru - 2 * a) + abs(rv + 2 * a) - base_uv

            # disjoint partners: the change at u, v depends only on the partner's value in -2..2
            rx, ry = r[x], r[y]
            e_side = np.abs(ru + se * vals - a) + np.abs(rv - se * vals + a) - base_uv
            gain = e_side[:, q + 2] + np.abs(rx + sf * a - q) + np.abs(ry - sf * a + q) - (np.abs(rx) + np.abs(ry))
            near = np.unique(np.concatenate([eid[start[u]:start[u + 1]], eid[start[v]:start[v + 1]]]))
            others = near[near != e]
            gain[:, others] = adjacent_gain(others, u, v, a)
            gain[:, e] = worst
            c, f = divmod(int(np.argmin(gain)), m)

            if flip_gain <= gain[c, f]:
                best_gain, best = flip_gain, ("flip", -1, -a, a)
            else:
                best_gain = int(gain[c, f])
                best = ("swap", f, int(se[c, 0] * q[f]), int(sf[c, 0] * a))

            if best_gain < 0:
                kind, f, new_e, new_f = best
                r[u] += new_e - a
                r[v] -= new_e - a
                if kind == "swap":
                    r[x[f]] += new_f - q[f]
                    r[y[f]] -= new_f - q[f]
                    q[f] = new_f
                q[e] = new_e
                improved = True
        if not improved:
            break
    return q


def sample_phases(g: Graph, spec: SamplerSpec) -> np.ndarray:
    """Draw one phase per edge (aligned with ``g.edges``) according to ``spec``."""
    rng = np.random.default_rng(spec.seed)
    m = g.num_edges
    if spec.kind == "uniform_full":
        return rng.uniform(-np.pi, np.pi, size=m)
    if spec.kind == "eighth_pi":
        return rng.uniform(-np.pi / 8, np.pi / 8, size=m)
    # multiples of pi/2: {0, pi/2, pi, -pi/2}
    q = np.array([0, 1, 2, -1])[rng.integers(0, 4, size=m)]
    q = _balance_quarter_turns(g.edges, g.n, q)
    return q * (np.pi / 2)


def sample_generator(g: Graph, spec: SamplerSpec) -> ChiralGenerator:
    return ChiralGenerator(g, sample_phases(g, spec), f"{spec.kind}:{spec.seed}")


@dataclass(frozen=True, eq=False)
class Propagator:
    """Spectral factorization ``H = X diag(lam) X^H`` of a generator."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: str = ""

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def unitary(self, t: float) -> np.ndarray:
        x = self.eigenvectors
        return (x * np.exp(-1j * self.eigenvalues * t)) @ x.conj().T

    @cached_property
    def _xh(self) -> np.ndarray:
        return np.ascontiguousarray(self.eigenvectors.conj().T)


def diagonalize(gen: ChiralGenerator) -> Propagator:
    h = gen.matrix()
    lam, x = la.eigh(h, check_finite=False)
    return Propagator(lam, x, gen.name)


def transition_matrix(p: Propagator, t: float) -> np.ndarray:
    """``P[j, k] = |<j|U(t)|k>|^2``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return np.eye(p.n)
    x = p.eigenvectors
    u = (x * np.exp(-1j * p.eigenvalues * t)) @ p._xh
    return u.real**2 + u.imag**2


def laplacian(g: Graph) -> np.ndarray:
    a = g.adjacency()
    return np.diag(a.sum(axis=1)) - a


def classical_transition_matrix(g: Graph, t: float) -> np.ndarray:
    """Continuous-time random walk kernel ``exp(-t L)`` with ``L = D - A``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return np.eye(g.n)
    lam, x = la.eigh(laplacian(g), check_finite=False)
    k = (x * np.exp(-lam * t)) @ x.T
    return np.clip(k, 0.0, 1.0)


def write_phases(gen: ChiralGenerator, dest: TextIO | str | os.PathLike) -> None:
    """One ``label_u<TAB>label_v<TAB>phase`` line per edge, ``label_u < label_v``."""
    g = gen.graph
    rows = []
    for (u, v), ph in zip(g.edges, gen.phases):
        a, b = g.labels[u], g.labels[v]
        rows.append((a, b, float(ph)) if a < b else (b, a, -float(ph)))
    rows.sort()
    text = "".join(f"{a}\t{b}\t{ph!r}\n" for a, b, ph in rows)
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)


def read_phases(g: Graph, source: TextIO | str | os.PathLike) -> np.ndarray:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return read_phases(g, fh)
    index = g.index_of()
    slot = {(int(u), int(v)): i for i, (u, v) in enumerate(g.edges)}
    phases = np.full(g.num_edges, np.nan)
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
        a, b, ph = index[parts[0]], index[parts[1]], float(parts[2])
        key = (a, b) if a < b else (b, a)
        if key not in slot:
            raise ValueError(f"line {lineno}: {parts[0]}-{parts[1]} is not an edge")
        phases[slot[key]] = ph if a < b else -ph
    if np.isnan(phases).any():
        raise ValueError("phase file does not cover every edge")
    return phases
