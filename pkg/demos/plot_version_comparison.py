"""
Predicting links of a later release
===================================

Rank the non-edges of an older network and check how many of the top k turn
up in a newer release. Nodes are matched by label; links touching nodes the
old release lacks cannot be predicted and are ignored.
"""

import numpy as np

from chiralqw import Graph, QuantumWalkMethod, compare_versions
from chiralqw.baselines import BaselineSpec
from _synthetic import ppi_like

new = ppi_like(300, seed=8)
rng = np.random.default_rng(0)
drop = rng.choice(new.num_edges, 60, replace=False)
keep = np.setdiff1d(np.arange(new.num_edges), drop)
old = Graph(new.labels, new.edges[keep])
print(f"old release {old.num_edges} edges, new release {new.num_edges} edges")

for method in (QuantumWalkMethod.nonchiral(), QuantumWalkMethod("quarter_pi_balanced", 5, True, 0),
               BaselineSpec("CN"), BaselineSpec("L3")):
    res = compare_versions(old, new, method, t=1.0, k=100)
    print(f"{res.method:26s} AP@100 {res.ap.display():>20s}  hits {res.ap.hits}")

# Identical releases: nothing to find, reported as "--".
print("identical releases:", compare_versions(old, old, BaselineSpec("CN"), k=100).ap.display())
