"""Quantum-classical and walker-walker distances between walk evolutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .graph import Graph
from .walks import (
    Propagator,
    SamplerSpec,
    build_generator,
    classical_transition_matrix,
    diagonalize,
    sample_generator,
    transition_matrix,
)

QUANTILES = (5, 25, 50, 75, 95)


def qc_distances(p: Propagator, g: Graph, t: float, classical: np.ndarray | None = None) -> np.ndarray:
    """``1 - sum_k P^RW_jk P^QW_jk`` for every start node ``j``.

    ``classical`` may carry a precomputed random-walk kernel for the same ``t``.
    """
    if p.n != g.n:
        raise ValueError("propagator and graph sizes differ")
    rw = classical_transition_matrix(g, t) if classical is None else classical
    qw = transition_matrix(p, t)
    return 1.0 - np.einsum("jk,jk->j", rw, qw)


def quantum_classical_distance(p: Propagator, g: Graph, t: float, j: int) -> float:
    return float(qc_distances(p, g, t)[j])


def global_max_over_sources(per_node: Callable[[int], float] | np.ndarray, g: Graph, t: float | None = None) -> float:
    """Exact maximum of a per-start-node distance over every node of ``g``.

    ``per_node`` is either a callable ``j -> value`` or the vector of all values.
    """
    if callable(per_node):
        vals = np.array([per_node(j) for j in range(g.n)])
    else:
        vals = np.asarray(per_node, dtype=float)
        if vals.shape != (g.n,):
            raise ValueError("need one value per node")
    if not len(vals):
        raise ValueError("graph has no nodes")
    return float(vals.max())


def walker_distances(p_l: Propagator, p_m: Propagator, t: float) -> np.ndarray:
    """``1 - |<j| U_l(t)^H U_m(t) |j>|^2`` for every start node ``j``."""
    if p_l.n != p_m.n:
        raise ValueError("propagators act on different dimensions")
    u_l, u_m = p_l.unitary(t), p_m.unitary(t)
    amp = np.einsum("ij,ij->j", u_l.conj(), u_m)
    return 1.0 - (amp.real**2 + amp.imag**2)


def walker_distance(p_l: Propagator, p_m: Propagator, t: float, j: int) -> float:
    if p_l.n != p_m.n:
        raise ValueError("propagators act on different dimensions")
    psi_l = evolve_from(p_l, t, j)
    psi_m = evolve_from(p_m, t, j)
    return float(1.0 - abs(np.vdot(psi_l, psi_m)) ** 2)


def evolve_from(p: Propagator, t: float, j: int) -> np.ndarray:
    """State ``U(t)|j>`` without forming the full unitary."""
    x = p.eigenvectors
    return x @ (np.exp(-1j * p.eigenvalues * t) * x[j].conj())


@dataclass
class DistanceReport:
    which: str
    t: float
    values: np.ndarray
    pairs: list[tuple[int, ...]]
    provenance: dict = field(default_factory=dict)

    def summary(self) -> dict:
        v = np.asarray(self.values, dtype=float)
        out = {
            "which": self.which,
            "t": self.t,
            "count": int(len(v)),
            "mean": float(v.mean()),
            "std": float(v.std()),
            "min": float(v.min()),
            "max": float(v.max()),
        }
        for q, val in zip(QUANTILES, np.percentile(v, QUANTILES, method="linear")):
            out[f"q{q:02d}"] = float(val)
        return out

    def rows(self) -> list[tuple]:
        return [(*pair, float(v)) for pair, v in zip(self.pairs, self.values)]


def swarm_propagators(g: Graph, sampler: SamplerSpec, walkers: int) -> list[Propagator]:
    """Index 0 is the nc walk; index ``m`` is chiral walker ``m`` (stream ``seed ^ m``)."""
    props = [diagonalize(build_generator(g))]
    props += [diagonalize(sample_generator(g, sampler.walker(m))) for m in range(1, walkers + 1)]
    return props


def swarm_distance_distribution(
    g: Graph,
    sampler: SamplerSpec,
    walkers: int,
    t: float,
    which: str = "pairwise",
    propagators: Sequence[Propagator] | None = None,
) -> DistanceReport:
    """Global (max over start node) distances across a swarm plus its nc walk."""
    if walkers < 1:
        raise ValueError("need at least one chiral walker")
    props = list(propagators) if propagators is not None else swarm_propagators(g, sampler, walkers)
    if len(props) != walkers + 1:
        raise ValueError("expected walkers + 1 propagators")
    prov = {"sampler": sampler.kind, "seed": sampler.seed, "walkers": walkers, "nodes": g.n,
            "edges": g.num_edges}
    if which == "qc":
        rw = classical_transition_matrix(g, t)
        vals = [global_max_over_sources(qc_distances(p, g, t, rw), g) for p in props]
        return DistanceReport("qc", t, np.array(vals), [(m,) for m in range(len(props))], prov)
    if which == "pairwise":
        unitaries = [p.unitary(t) for p in props]
        pairs, vals = [], []
        for l, m in combinations(range(len(props)), 2):
            amp = np.einsum("ij,ij->j", unitaries[l].conj(), unitaries[m])
            per_node = 1.0 - (amp.real**2 + amp.imag**2)
            pairs.append((l, m))
            vals.append(global_max_over_sources(per_node, g))
        return DistanceReport("pairwise", t, np.array(vals), pairs, prov)
    raise ValueError(f"unknown distance kind {which!r}; expected 'qc' or 'pairwise'")
