"""
Performance over evolution time
===============================

One eigendecomposition per walker serves every evolution time, and the same
fold draws are used at each t, so the curves are paired comparisons.
"""

from chiralqw import FoldPlan, QuantumWalkMethod, sweep_time
from _synthetic import ppi_like

g = ppi_like(200, seed=5)
plan = FoldPlan.for_removal(0.5, repeats=2, master_seed=1)
times = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
curves = {}
for name, method in [("nc", QuantumWalkMethod.nonchiral()),
                     ("pi/8", QuantumWalkMethod("eighth_pi", 5, True, 0)),
                     ("pi/2", QuantumWalkMethod("quarter_pi_balanced", 5, True, 0))]:
    curves[name] = [rep.mean("aupr") for rep in sweep_time(g, plan, method, times)]

print("t      " + "  ".join(f"{t:7.2f}" for t in times))
for name, vals in curves.items():
    print(f"{name:6s} " + "  ".join(f"{v:7.4f}" for v in vals))

# Peak gains relative to the non-chiral walk.
nc_peak = max(curves["nc"])
for name in ("pi/8", "pi/2"):
    print(f"{name}: peak AuPR {max(curves[name]):.4f}, {max(curves[name]) / nc_peak - 1:+.1%} vs nc")
