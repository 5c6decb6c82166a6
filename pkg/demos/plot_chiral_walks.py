"""
Chiral continuous-time quantum walks
====================================

A chiral walk evolves under a Hermitian generator whose edge entries carry
phases, ``H[u, v] = exp(i phi_uv)``. With all phases zero it is the adjacency
matrix. Phases break time-reversal symmetry of transport, except on trees,
where they can be gauged away.
"""

import numpy as np

from chiralqw import SamplerSpec, build_generator, diagonalize, transition_matrix
from chiralqw.graph import Graph
from chiralqw.walks import row_imbalance, sample_phases

# Three-node path: P_13(t) = ((1 - cos(sqrt(2) t)) / 2)^2, perfect transfer at t = pi/sqrt(2).
path = Graph.from_pairs(["a", "b", "c"], [(0, 1), (1, 2)])
prop = diagonalize(build_generator(path))
for t in (0.5, 1.0, np.pi / np.sqrt(2)):
    closed = ((1 - np.cos(np.sqrt(2) * t)) / 2) ** 2
    print(f"t={t:.4f}  P_13={transition_matrix(prop, t)[0, 2]:.12f}  closed form={closed:.12f}")

# Triangle with pi/2 on each edge of the cycle a -> b -> c -> a: transport acquires a direction.
tri = Graph.from_pairs(["a", "b", "c"], [(0, 1), (1, 2), (0, 2)])
phases = np.array([np.pi / 2, -np.pi / 2, np.pi / 2])  # edges (a,b), (a,c), (b,c)
p = transition_matrix(diagonalize(build_generator(tri, phases)), np.pi / 3)
print("chiral triangle, t = pi/3\n", np.round(p, 6))
print("a->b", round(p[1, 0], 6), "vs b->a", round(p[0, 1], 6))

# On a tree every phase pattern is a gauge transform: probabilities are unchanged.
rng = np.random.default_rng(1)
tree = Graph.from_pairs([str(i) for i in range(8)], [(i, int(rng.integers(i))) for i in range(1, 8)])
chiral = transition_matrix(diagonalize(build_generator(tree, rng.uniform(-np.pi, np.pi, tree.num_edges))), 2.0)
plain = transition_matrix(diagonalize(build_generator(tree)), 2.0)
print("tree: max |P_chiral - P_nc| =", np.abs(chiral - plain).max())

# The three phase samplers. The pi/2 sampler rearranges its draws to balance
# the per-node phase sums.
from _synthetic import ppi_like  # noqa: E402

g = ppi_like(200, seed=3)
for kind in ("uniform_full", "eighth_pi", "quarter_pi_balanced"):
    ph = sample_phases(g, SamplerSpec(kind, 7))
    print(f"{kind:20s} range [{ph.min():+.3f}, {ph.max():+.3f}]  row imbalance {row_imbalance(g, ph):8.2f}")
raw = np.array([0, 1, 2, -1])[np.random.default_rng(7).integers(0, 4, g.num_edges)] * np.pi / 2
print(f"{'pi/2 before balance':20s} row imbalance {row_imbalance(g, raw):8.2f}")
