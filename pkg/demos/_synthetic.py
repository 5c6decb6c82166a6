"""Small synthetic interactome-like graphs for the demo scripts."""

import numpy as np

from chiralqw.graph import Graph, canonicalize


def ppi_like(n=250, m=2, p_triad=0.3, seed=0):
    """Preferential attachment with triad formation (heavy-tailed, mildly clustered)."""
    rng = np.random.default_rng(seed)
    edges = {(0, 1), (0, 2), (1, 2)}
    targets = [0, 1, 1, 2, 2, 0]
    nbrs = {0: {1, 2}, 1: {0, 2}, 2: {0, 1}}
    for v in range(3, n):
        nbrs[v] = set()
        first = targets[rng.integers(len(targets))]
        chosen = [first]
        while len(chosen) < m:
            pool = sorted(nbrs[chosen[-1]] - set(chosen))
            if pool and rng.random() < p_triad:
                chosen.append(pool[rng.integers(len(pool))])
            else:
                w = targets[rng.integers(len(targets))]
                if w not in chosen:
                    chosen.append(w)
        for u in chosen:
            edges.add((u, v))
            nbrs[u].add(v)
            nbrs[v].add(u)
            targets += [u, v]
    labels = [f"P{i:04d}" for i in range(n)]
    return canonicalize(Graph.from_pairs(labels, sorted(edges)))
