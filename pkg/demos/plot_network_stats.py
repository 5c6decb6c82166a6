"""
Network statistics and radar data
=================================

Parse edge lists, keep the largest connected component, and compute the
descriptive statistics used to compare interactomes: node and edge counts,
mean degree, density and mean clustering. Dividing each field by its maximum
over the set gives radar-chart coordinates.
"""

import io

from chiralqw import canonicalize, compute_stats, normalize_stats, parse_edge_list
from _synthetic import ppi_like

# A raw export usually lists both orientations, duplicates and self-pairs.
raw = io.StringIO("""# gene_a gene_b
Actb Myc
Myc Actb
Myc Myc
Myc Tp53
Tp53 Actb
Egfr Grb2
""")
g = parse_edge_list(raw)
print("parsed:", g.n, "nodes", g.num_edges, "edges, self-loops", g.self_loops)

# The self-loop goes and the Egfr-Grb2 pair is a separate component.
core = canonicalize(g)
print("canonical:", core.labels, core.edges.tolist())

# Statistics for three synthetic networks of growing size.
networks = {f"synthetic-{n}": ppi_like(n, seed=n) for n in (150, 300, 600)}
stats = [compute_stats(h) for h in networks.values()]
for name, s in zip(networks, stats):
    print(f"{name:14s} |V|={s.num_nodes:4d} |E|={s.num_edges:5d} <k>={s.mean_degree:.3f} "
          f"rho={s.density:.4f} C={s.mean_clustering:.3f}")

# Radar coordinates: each field relative to the largest network value.
for name, row in zip(networks, normalize_stats(stats)):
    print(name, {k: round(v, 3) for k, v in row.items()})
