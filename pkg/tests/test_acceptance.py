"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL|BLOCKED  <detail>`` line
(collected into the terminal summary) before asserting. Criteria 6-8 need the
Musculus-HINT 2024-6 interactome, which is not redistributed; point
``CHIRALQW_MUSCULUS_HINT`` at the file to run them. Column layout can be set
with ``CHIRALQW_MUSCULUS_COLUMNS`` (default ``0,1``) and
``CHIRALQW_MUSCULUS_SKIP`` (header lines, default ``1``).

Run standalone with ``python tests/test_acceptance.py`` or through pytest.
"""

import json
import math
import os
import sys
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from chiralqw.baselines import BaselineSpec, baseline_score, spm_perturbed_matrix  # noqa: E402
from chiralqw.cli import main as cli_main  # noqa: E402
from chiralqw.distances import swarm_distance_distribution, swarm_propagators  # noqa: E402
from chiralqw.evaluation import (  # noqa: E402
    FoldPlan,
    QuantumWalkMethod,
    auroc_midrank,
    auroc_trapezoid,
    average_precision_at_k,
    make_folds,
    sweep_swarm_size_both,
    sweep_time,
)
from chiralqw.graph import Graph, canonicalize, compute_stats, parse_edge_list, write_edge_list  # noqa: E402
from chiralqw.walks import (  # noqa: E402
    SamplerSpec,
    build_generator,
    diagonalize,
    transition_matrix,
)
from conftest import ACCEPTANCE_LINES, erdos_renyi, make_graph, path_graph  # noqa: E402
from oracles import brute_baselines, brute_clustering, random_tree  # noqa: E402

DATA = Path(__file__).parent / "data"
MUSCULUS_ENV = "CHIRALQW_MUSCULUS_HINT"
MUSCULUS_PUBLISHED = {"num_nodes": "1486", "num_edges": "2423", "mean_degree": "3.261", "density": "0.0022",
                   "mean_clustering": "0.108"}


def report(number: int, ok: bool | None, detail: str) -> None:
    status = {True: "PASS", False: "FAIL", None: "BLOCKED"}[ok]
    line = f"criterion {number}: {status}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    if ok is None:
        pytest.skip(line)
    assert ok, line


def musculus_graph() -> Graph | None:
    path = os.environ.get(MUSCULUS_ENV)
    if not path:
        return None
    cols = tuple(int(c) for c in os.environ.get("CHIRALQW_MUSCULUS_COLUMNS", "0,1").split(","))
    skip = int(os.environ.get("CHIRALQW_MUSCULUS_SKIP", "1"))
    return canonicalize(parse_edge_list(path, None, "#", cols, skip))


def printed(stats) -> dict:
    return {
        "num_nodes": str(stats.num_nodes),
        "num_edges": str(stats.num_edges),
        "mean_degree": f"{stats.mean_degree:.3f}",
        "density": f"{stats.density:.4f}",
        "mean_clustering": f"{stats.mean_clustering:.3f}",
    }


# 1


def consistency_failures(g: Graph) -> list[str]:
    s = compute_stats(g)
    bad = []
    if g.degree.sum() != 2 * g.num_edges:
        bad.append("degree sum")
    if not math.isclose(s.mean_degree, 2 * s.num_edges / s.num_nodes, rel_tol=1e-15):
        bad.append("mean degree")
    if not math.isclose(s.density * s.num_nodes * (s.num_nodes - 1) / 2, s.num_edges, rel_tol=1e-12):
        bad.append("density")
    if abs(s.mean_clustering - brute_clustering(g.n, g.edge_set())) > 1e-12:
        bad.append("clustering")
    return bad


def test_criterion_1_network_statistics():
    g = musculus_graph()
    if g is not None:
        got = printed(compute_stats(g))
        diff = {k: (got[k], v) for k, v in MUSCULUS_PUBLISHED.items() if got[k] != v}
        report(1, not diff and not consistency_failures(g), f"Musculus-HINT stats {got}; mismatches {diff}")
    graphs = [canonicalize(parse_edge_list(DATA / "toy_hint.tsv", None, "#", (2, 3), 1))]
    graphs += [canonicalize(erdos_renyi(int(n), 0.1, s)) for s, n in enumerate(np.linspace(20, 120, 8))]
    failures = {i: f for i, g in enumerate(graphs) if (f := consistency_failures(g))}
    report(1, not failures, f"degraded to internal consistency on {len(graphs)} graphs ({MUSCULUS_ENV} unset); "
                            f"failures {failures}")


# 2


def test_criterion_2_analytic_propagation():
    prop = diagonalize(build_generator(path_graph(3)))
    times = np.round(np.arange(1, 51) * 0.1, 10)
    err_path = max(abs(transition_matrix(prop, t)[0, 2] - ((1 - np.cos(np.sqrt(2) * t)) / 2) ** 2) for t in times)
    rng = np.random.default_rng(2024)
    worst = {"unitary": 0.0, "stochastic": 0.0, "compose": 0.0}
    for _ in range(200):
        n = int(rng.integers(2, 101))
        g = erdos_renyi(n, float(rng.uniform(0.02, 0.5)), int(rng.integers(2**31)))
        p = diagonalize(build_generator(g, rng.uniform(-np.pi, np.pi, g.num_edges)))
        t1, t2 = rng.uniform(0, 10, 2)
        u1, u2 = p.unitary(t1), p.unitary(t2)
        pm = np.abs(u1) ** 2
        worst["unitary"] = max(worst["unitary"], np.abs(u1.conj().T @ u1 - np.eye(n)).max())
        worst["stochastic"] = max(worst["stochastic"], np.abs(pm.sum(axis=1) - 1).max(), np.abs(pm.sum(axis=0) - 1).max())
        worst["compose"] = max(worst["compose"], np.abs(p.unitary(t1 + t2) - u1 @ u2).max())
    ok = err_path < 1e-10 and max(worst.values()) < 1e-9
    report(2, ok, f"3-path max error {err_path:.2e} over 50 times (tol 1e-10); "
                  f"200 chiral generators worst {', '.join(f'{k}={v:.1e}' for k, v in worst.items())} (tol 1e-9)")


# 3


def test_criterion_3_tree_gauge():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 61))
        g = make_graph(n, random_tree(n, rng))
        t = float(rng.uniform(0.05, 10))
        a = transition_matrix(diagonalize(build_generator(g, rng.uniform(-np.pi, np.pi, g.num_edges))), t)
        b = transition_matrix(diagonalize(build_generator(g)), t)
        worst = max(worst, np.abs(a - b).max())
    report(3, worst < 1e-9, f"50 random trees, worst entrywise gap {worst:.2e} (tol 1e-9)")


# 4


def test_criterion_4_metric_oracles():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 300))
        levels = int(rng.integers(1, n + 1))
        scores = rng.integers(0, levels, n) / levels
        labels = rng.random(n) < rng.uniform(0.05, 0.95)
        labels[0], labels[1] = True, False
        worst = max(worst, abs(auroc_midrank(scores, labels) - auroc_trapezoid(scores, labels)))
    items = list("abcd")
    hand = [
        average_precision_at_k(items, {"a", "c"}, 3).value == 5 / 6,
        average_precision_at_k(items, {"a", "b", "c"}, 3).value == 1.0,
        average_precision_at_k(items, set("abcd"), 4).value == 1.0,
    ]
    report(4, worst < 1e-12 and all(hand),
           f"midrank vs trapezoid worst {worst:.1e} over 1000 vectors (tol 1e-12); AP@k hand cases {hand}")


# 5


def spm_oracle(g: Graph, p_h: float, seed: int) -> np.ndarray:
    held_count = math.ceil(p_h * g.num_edges)
    order = np.random.default_rng(seed).permutation(g.num_edges)
    held = {tuple(e) for e in g.edges[order[:held_count]].tolist()}
    a = np.zeros((g.n, g.n))
    da = np.zeros((g.n, g.n))
    for u, v in g.edges.tolist():
        target = da if (u, v) in held else a
        target[u, v] = target[v, u] = 1.0
    lam, vecs = np.linalg.eigh(a)
    if np.diff(lam).min() < 1e-6:
        return None
    out = np.zeros_like(a)
    for k in range(g.n):
        x = vecs[:, k]
        out += (lam[k] + x @ da @ x) * np.outer(x, x)
    return out


def test_criterion_5_baseline_oracles():
    rng = np.random.default_rng(5)
    mismatches = 0
    for i in range(20):
        g = erdos_renyi(int(rng.integers(5, 51)), float(rng.uniform(0.05, 0.4)), 500 + i)
        oracle = brute_baselines(g.n, g.edge_set())
        for kind in ("CN", "AA", "PA", "L3"):
            got = baseline_score(g, BaselineSpec(kind)).as_dict()
            tol = 1e-9 if kind in ("AA", "L3") else 0.0
            mismatches += sum(abs(got[p] - oracle[p][kind]) > tol for p in oracle)
    # the first-order formula is basis-free only on simple spectra; draw until 5 such graphs
    worst, used, seed = 0.0, 0, 0
    while used < 5:
        g = erdos_renyi(int(rng.integers(10, 31)), 0.3, 900 + seed)
        seed += 1
        if g.num_edges < 10:
            continue
        want = spm_oracle(g, 0.1, seed)
        if want is None:
            continue
        worst = max(worst, np.abs(spm_perturbed_matrix(g, 0.1, seed) - want).max())
        used += 1
    report(5, mismatches == 0 and worst < 1e-6,
           f"CN/AA/PA/L3 mismatches {mismatches} on 20 graphs; SPM worst {worst:.1e} on 5 graphs n<=30 (tol 1e-6)")


# 6-8 (Musculus-HINT)


def convergence_checks(g: Graph, sizes=(1, 2, 5, 10, 15), seed=0, workers=1) -> tuple[bool, str]:
    plan = FoldPlan.for_removal(0.1, master_seed=seed)
    uni = sweep_swarm_size_both(g, plan, SamplerSpec("uniform_full", seed), sizes, 1.0, workers)
    quarter = sweep_swarm_size_both(g, plan, SamplerSpec("quarter_pi_balanced", seed), sizes, 1.0, workers)
    c = [r.mean("aupr") for r in uni[False]]
    se = [r.std("aupr") / math.sqrt(len(r.trials)) for r in uni[False]]
    tot = [r.mean("aupr") for r in uni[True][-len(sizes):]]
    rising = all(c[i + 1] >= c[i] - se[i] for i in range(len(c) - 1))
    saturated = abs(c[-2] - c[-1]) <= 0.02 * c[-1]
    q_conv = quarter[False][-1].mean("aupr")
    quarter_ok = q_conv >= c[-1]
    nc_helps = all(t > x for t, x in zip(tot, c))
    detail = (f"uniform c-swarm AuPR {[round(x, 5) for x in c]} rising={rising} "
              f"M{sizes[-2]}~M{sizes[-1]}={saturated}; pi/2 converged {q_conv:.5f}>=uniform={quarter_ok}; "
              f"with nc {[round(x, 5) for x in tot]} raises every M={nc_helps}")
    return rising and saturated and quarter_ok and nc_helps, detail


def time_checks(g: Graph, times=(0.25, 0.5, 1, 2, 4, 8), walkers=10, seed=0, workers=1) -> tuple[bool, str]:
    plan = FoldPlan.for_removal(0.5, master_seed=seed)
    curves = {}
    for name, method in [("nc", QuantumWalkMethod.nonchiral()),
                         ("pi8", QuantumWalkMethod("eighth_pi", walkers, True, seed)),
                         ("pi2", QuantumWalkMethod("quarter_pi_balanced", walkers, True, seed))]:
        curves[name] = [r.mean("aupr") for r in sweep_time(g, plan, method, list(times), workers)]
    peak = {k: max(v) for k, v in curves.items()}
    gain8 = peak["pi8"] / peak["nc"] - 1
    gain2 = peak["pi2"] / peak["nc"] - 1
    late = all(curves[k][i] >= curves["nc"][i] for k in ("pi8", "pi2") for i in (-2, -1))
    ok = 0.03 <= gain8 <= 0.09 and 0.05 <= gain2 <= 0.12 and late
    detail = (f"peak gain pi/8 {gain8:+.2%} (band 3-9%), pi/2 {gain2:+.2%} (band 5-12%); "
              f"swarms >= nc at t={times[-2]},{times[-1]}: {late}; curves "
              + json.dumps({k: [round(x, 5) for x in v] for k, v in curves.items()}))
    return ok, detail


def distance_checks(g: Graph, walkers=10, seed=0) -> tuple[bool, str]:
    trial = make_folds(g, FoldPlan.for_removal(0.1, master_seed=seed))[0]
    obs = trial.observed
    stats, qc_min = {}, 1.0
    for kind in ("uniform_full", "quarter_pi_balanced"):
        sampler = SamplerSpec(kind, seed)
        props = swarm_propagators(obs, sampler, walkers)
        qc = swarm_distance_distribution(obs, sampler, walkers, 1.0, "qc", props)
        pw = swarm_distance_distribution(obs, sampler, walkers, 1.0, "pairwise", props)
        qc_min = min(qc_min, float(qc.values.min()))
        stats[kind] = pw.summary()
    u, q = stats["uniform_full"], stats["quarter_pi_balanced"]
    squeezed = q["mean"] > u["mean"] and q["std"] < u["std"]
    detail = (f"min global D_QC {qc_min:.5f} (need >0.99); pairwise D_lm mean/std "
              f"uniform {u['mean']:.5f}/{u['std']:.5f}, pi/2 {q['mean']:.5f}/{q['std']:.5f}")
    return qc_min > 0.99 and squeezed, detail


@pytest.mark.slow
def test_criterion_6_swarm_convergence():
    g = musculus_graph()
    if g is None:
        report(6, None, f"Musculus-HINT interactome not available; set {MUSCULUS_ENV}")
    report(6, *convergence_checks(g, workers=os.cpu_count() or 1))


@pytest.mark.slow
def test_criterion_7_time_dependence():
    g = musculus_graph()
    if g is None:
        report(7, None, f"Musculus-HINT interactome not available; set {MUSCULUS_ENV}")
    report(7, *time_checks(g, workers=os.cpu_count() or 1))


@pytest.mark.slow
def test_criterion_8_distances():
    g = musculus_graph()
    if g is None:
        report(8, None, f"Musculus-HINT interactome not available; set {MUSCULUS_ENV}")
    report(8, *distance_checks(g))


def test_musculus_checks_execute_on_small_graph():
    # exercises the criterion 6-8 code paths; outcomes on this graph carry no meaning
    g = canonicalize(erdos_renyi(40, 0.15, 8))
    for ok, detail in (convergence_checks(g, sizes=(1, 2)), time_checks(g, times=(0.5, 1.0), walkers=2),
                       distance_checks(g, walkers=2)):
        assert isinstance(ok, bool) and detail


# 9


def ranking_ap_oracle(g_old: Graph, g_new: Graph, k: int) -> float | None:
    """Brute-force CN scores, full ranking by (-score, label pair), AP@k over label-matched new links."""
    nbrs = {lab: set() for lab in g_old.labels}
    for u, v in g_old.edges.tolist():
        a, b = g_old.labels[u], g_old.labels[v]
        nbrs[a].add(b)
        nbrs[b].add(a)
    pairs = [(a, b) for a, b in combinations(sorted(g_old.labels), 2) if b not in nbrs[a]]
    ranked = sorted(pairs, key=lambda p: (-len(nbrs[p[0]] & nbrs[p[1]]), p))
    new = {tuple(sorted((g_new.labels[u], g_new.labels[v]))) for u, v in g_new.edges.tolist()}
    hits, acc = 0, Fraction(0)
    for i, pair in enumerate(ranked[:k], start=1):
        if pair in new:
            hits += 1
            acc += Fraction(hits, i)
    return float(acc / hits) if hits else None


def synthetic_versions(seed: int) -> tuple[Graph, Graph]:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(30, 201))
    full = canonicalize(erdos_renyi(n, float(rng.uniform(3, 8)) / n, 7000 + seed))
    drop = rng.choice(full.num_edges, max(1, full.num_edges // 10), replace=False)
    keep = np.setdiff1d(np.arange(full.num_edges), drop)
    old = canonicalize(Graph(full.labels, full.edges[keep]))
    # the newer release also brings a brand-new node
    labels = list(full.labels) + ["znew"]
    extra = [(full.n, int(j)) for j in rng.choice(full.n, 3, replace=False)]
    new = Graph.from_pairs(labels, [tuple(e) for e in full.edges.tolist()] + extra)
    return old, new


def test_criterion_9_compare_versions(tmp_path):
    mismatches = []
    for seed in range(20):
        old, new = synthetic_versions(seed)
        write_edge_list(old, tmp_path / f"old{seed}.tsv")
        write_edge_list(new, tmp_path / f"new{seed}.tsv")
        k = min(100, len(old.non_edges[0]))
        out = tmp_path / f"runs{seed}"
        rc = cli_main(["compare-versions", "--input", str(tmp_path / f"old{seed}.tsv"),
                       "--input-new", str(tmp_path / f"new{seed}.tsv"), "--method", "CN",
                       "--top-k", str(k), "--out", str(out)])
        (run_dir,) = out.iterdir()
        got = json.loads((run_dir / "report.json").read_text())["result"]["results"]["CN"]["ap_at_k"]
        want = ranking_ap_oracle(old, new, k)
        if rc != 0 or got != want:
            mismatches.append((seed, got, want))
    report(9, not mismatches, f"AP@100 via compare-versions vs brute-force ranking on 20 instances; "
                              f"mismatches {mismatches}")


# 10


def test_criterion_10_determinism(tmp_path):
    g = canonicalize(erdos_renyi(50, 0.1, 10))
    write_edge_list(g, tmp_path / "g.tsv")
    old, new = synthetic_versions(3)
    write_edge_list(old, tmp_path / "old.tsv")
    write_edge_list(new, tmp_path / "new.tsv")
    src = str(tmp_path / "g.tsv")
    commands = [
        ["stats", "--input", src, "--input", str(tmp_path / "old.tsv")],
        ["predict", "--input", src, "--walkers", "4", "--save-scores"],
        ["crossval", "--input", src, "--method", "nc,swarm,swarm:uniform,swarm:pi8,CN,AA,PA,L3,SPM",
         "--walkers", "4", "--removal", "0.2"],
        ["sweep-time", "--input", src, "--method", "swarm", "--walkers", "4", "--times", "0.5,1,4", "--removal", "0.5"],
        ["sweep-swarm", "--input", src, "--walkers-list", "1,2,4", "--sampler", "uniform"],
        ["compare-versions", "--input", str(tmp_path / "old.tsv"), "--input-new", str(tmp_path / "new.tsv"),
         "--method", "nc,swarm,L3", "--walkers", "4"],
        ["distances", "--input", src, "--walkers", "4", "--which", "qc"],
        ["distances", "--input", src, "--walkers", "4", "--removal", "0.1"],
    ]
    differing = []
    for i, argv in enumerate(commands):
        outputs = []
        for run, threads in enumerate((1, 1, 8)):
            out = tmp_path / f"c{i}-{run}"
            assert cli_main(argv + ["--threads", str(threads), "--out", str(out)]) == 0
            (run_dir,) = out.iterdir()
            outputs.append({p.relative_to(run_dir).as_posix(): p.read_bytes()
                            for p in sorted(run_dir.rglob("*")) if p.is_file() and p.name != "runtime.json"})
        if not outputs[0] == outputs[1] == outputs[2]:
            differing.append(argv[0])
    report(10, not differing, f"{len(commands)} command runs at threads 1,1,8; differing outputs {differing}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
