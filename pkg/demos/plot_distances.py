"""
Distances between walk evolutions
=================================

Two diagnostics compare walkers started on the same node j:

* quantum-classical: ``1 - sum_k P^RW_jk P^QW_jk`` against the Laplacian
  random walk;
* walker-walker: ``1 - |<j| U_l^H U_m |j>|^2`` between two unitaries.

Both are reduced to one number by maximizing over j, then summarized across
a swarm.
"""

from chiralqw import FoldPlan, SamplerSpec, make_folds
from chiralqw.distances import swarm_distance_distribution, swarm_propagators
from _synthetic import ppi_like

g = make_folds(ppi_like(250, seed=2), FoldPlan.for_removal(0.1))[0].observed
for kind in ("uniform_full", "quarter_pi_balanced"):
    sampler = SamplerSpec(kind, 0)
    props = swarm_propagators(g, sampler, 6)  # index 0 is the non-chiral walk
    qc = swarm_distance_distribution(g, sampler, 6, 1.0, "qc", props).summary()
    pw = swarm_distance_distribution(g, sampler, 6, 1.0, "pairwise", props).summary()
    print(f"{kind}")
    print(f"  D_QC  min {qc['min']:.4f}  mean {qc['mean']:.4f}")
    print(f"  D_lm  mean {pw['mean']:.4f}  std {pw['std']:.4f}  "
          f"quartiles {pw['q25']:.4f} / {pw['q50']:.4f} / {pw['q75']:.4f}")
