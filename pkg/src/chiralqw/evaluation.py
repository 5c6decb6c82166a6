"""Edge-removal cross-validation, ranking metrics and version comparison."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .baselines import BaselineSpec, baseline_score
from .graph import Graph
from .scoring import ScoreTable, swarm_scores_over_time, swarm_size_prefixes
from .walks import SamplerSpec

DEFAULT_REPEATS = {0.1: 1, 0.2: 2, 0.5: 5}
MAX_CURVE_POINTS = 10_000


@dataclass(frozen=True)
class QuantumWalkMethod:
    """Quantum-walk scoring: the nc walk alone (``walkers=0``) or a chiral swarm."""

    sampler: str | None = "quarter_pi_balanced"
    walkers: int = 10
    include_nonchiral: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.walkers and self.sampler is None:
            raise ValueError("a chiral swarm needs a sampler")
        if not self.walkers and not self.include_nonchiral:
            raise ValueError("empty swarm")

    @classmethod
    def nonchiral(cls) -> "QuantumWalkMethod":
        return cls(sampler=None, walkers=0, include_nonchiral=True)

    @property
    def sampler_spec(self) -> SamplerSpec | None:
        return SamplerSpec(self.sampler, self.seed) if self.walkers else None

    @property
    def method_id(self) -> str:
        if not self.walkers:
            return "qw-nc"
        kind = self.sampler_spec.kind
        return f"qw-{kind}-M{self.walkers}" + ("-tot" if self.include_nonchiral else "-c")


Method = QuantumWalkMethod | BaselineSpec


def method_id(method: Method) -> str:
    return method.method_id


def score_tables(method: Method, g: Graph, times: Sequence[float], workers: int = 1) -> list[ScoreTable]:
    """One table per time; baselines ignore time and share a single table."""
    if isinstance(method, BaselineSpec):
        table = baseline_score(g, method)
        return [table] * len(times)
    return swarm_scores_over_time(
        g, method.sampler_spec, method.walkers, times, method.include_nonchiral, workers
    )


# --------------------------------------------------------------------------
# folds


@dataclass(frozen=True)
class FoldPlan:
    removal_fraction: float
    k_folds: int
    repeats: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if self.k_folds < 2 or self.repeats < 1:
            raise ValueError("need k_folds >= 2 and repeats >= 1")
        if abs(self.k_folds * self.removal_fraction - 1.0) > 1e-9:
            raise ValueError("k_folds * removal_fraction must equal 1")

    @classmethod
    def for_removal(cls, fraction: float, repeats: int | None = None, master_seed: int = 0) -> "FoldPlan":
        k = int(round(1.0 / fraction))
        if repeats is None:
            repeats = DEFAULT_REPEATS.get(round(fraction, 6), 1)
        return cls(fraction, k, repeats, master_seed)

    @property
    def num_trials(self) -> int:
        return self.k_folds * self.repeats


@dataclass(frozen=True, eq=False)
class Trial:
    original: Graph
    observed: Graph
    positives: np.ndarray
    repeat: int = 0
    fold: int = 0

    @cached_property
    def labels(self) -> np.ndarray:
        """Positive indicator over ``observed.non_edges``."""
        rows, cols = self.observed.non_edges
        n = self.observed.n
        pos = np.zeros(n * n, dtype=bool)
        pos[self.positives[:, 0] * n + self.positives[:, 1]] = True
        return pos[rows * n + cols]


def _without(g: Graph, removed: np.ndarray) -> Graph:
    keep = np.ones(g.num_edges, dtype=bool)
    keep[removed] = False
    return Graph(g.labels, g.edges[keep])


def make_folds(g: Graph, plan: FoldPlan) -> list[Trial]:
    """Partition the edges into ``k`` folds per repeat; each fold is one trial's test set."""
    if g.num_edges < plan.k_folds:
        raise ValueError(f"{g.num_edges} edges cannot fill {plan.k_folds} folds")
    trials = []
    for r in range(plan.repeats):
        perm = np.random.default_rng([plan.master_seed, r]).permutation(g.num_edges)
        # array_split puts the remainder one-per-fold on the leading folds
        for f, idx in enumerate(np.array_split(perm, plan.k_folds)):
            idx = np.sort(idx)
            trials.append(Trial(g, _without(g, idx), g.edges[idx], r, f))
    return trials


# --------------------------------------------------------------------------
# ranking metrics


def auroc_midrank(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney estimate with average ranks for ties."""
    labels = np.asarray(labels, dtype=bool)
    p = int(labels.sum())
    q = len(labels) - p
    if p == 0 or q == 0:
        raise ValueError("need at least one positive and one negative")
    ranks = rankdata(scores, method="average")
    return float((ranks[labels].sum() - p * (p + 1) / 2.0) / (p * q))


def tie_blocks(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cumulative (rank, tp, fp) at the end of each block of equal scores, best first."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    order = np.argsort(-scores, kind="stable")
    s, y = scores[order], labels[order]
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.cumsum(y)[ends]
    rank = ends + 1
    return rank, tp, rank - tp


def roc_curve(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    rank, tp, fp = tie_blocks(scores, labels)
    p, q = tp[-1], fp[-1]
    return np.r_[0.0, fp / q], np.r_[0.0, tp / p]


def auroc_trapezoid(scores, labels) -> float:
    fpr, tpr = roc_curve(scores, labels)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def pr_curve(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    rank, tp, _ = tie_blocks(scores, labels)
    return tp / tp[-1], tp / rank


def average_precision(scores, labels) -> float:
    """Step-integrated area under precision-recall; a tie block uses its end precision."""
    recall, precision = pr_curve(scores, labels)
    return float(np.sum(np.diff(np.r_[0.0, recall]) * precision))


def _thin(n: int, limit: int = MAX_CURVE_POINTS) -> np.ndarray:
    if n <= limit:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, limit).round().astype(np.int64))


@dataclass
class TrialResult:
    auroc: float
    aupr: float
    num_pos: int
    num_neg: int
    roc: tuple[np.ndarray, np.ndarray] = field(repr=False)
    pr: tuple[np.ndarray, np.ndarray] = field(repr=False)
    tp_at_rank: tuple[np.ndarray, np.ndarray] = field(repr=False)
    repeat: int = 0
    fold: int = 0


def evaluate_ranking(scores: ScoreTable, trial: Trial) -> TrialResult:
    if scores.graph is not trial.observed and not (
        scores.graph.n == trial.observed.n
        and np.array_equal(scores.rows, trial.observed.non_edges[0])
        and np.array_equal(scores.cols, trial.observed.non_edges[1])
    ):
        raise ValueError("score table is not defined on the trial's ranked universe")
    labels = trial.labels
    vals = scores.values
    p = int(labels.sum())
    if p == 0 or p == len(labels):
        raise ValueError("trial needs both positives and negatives")
    rank, tp, _ = tie_blocks(vals, labels)
    return TrialResult(
        auroc=auroc_midrank(vals, labels),
        aupr=average_precision(vals, labels),
        num_pos=p,
        num_neg=len(labels) - p,
        roc=roc_curve(vals, labels),
        pr=pr_curve(vals, labels),
        tp_at_rank=(rank, tp),
        repeat=trial.repeat,
        fold=trial.fold,
    )


# --------------------------------------------------------------------------
# reports


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return repr(int(x)) if isinstance(x, (int, np.integer)) else repr(float(x))


def write_csv(path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    cols = [np.asarray(c) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass
class EvaluationReport:
    method: str
    t: float
    trials: list[TrialResult]
    provenance: dict = field(default_factory=dict)

    def values(self, metric: str) -> np.ndarray:
        return np.array([getattr(tr, metric) for tr in self.trials])

    def mean(self, metric: str = "aupr") -> float:
        return float(self.values(metric).mean())

    def std(self, metric: str = "aupr") -> float:
        return float(self.values(metric).std())

    def summary(self) -> dict:
        return {
            "method": self.method,
            "t": self.t,
            "num_trials": len(self.trials),
            "auroc_mean": self.mean("auroc"),
            "auroc_std": self.std("auroc"),
            "aupr_mean": self.mean("aupr"),
            "aupr_std": self.std("aupr"),
        }

    def to_dict(self, curve_dir: str | None = None) -> dict:
        out = dict(self.summary())
        out["provenance"] = self.provenance
        trials = []
        for i, tr in enumerate(self.trials):
            item = {"repeat": tr.repeat, "fold": tr.fold, "auroc": tr.auroc, "aupr": tr.aupr,
                    "positives": tr.num_pos, "negatives": tr.num_neg}
            if curve_dir is not None:
                stem = f"{curve_dir}/trial{i:02d}"
                item["curves"] = {k: f"{stem}_{k}.csv" for k in ("roc", "pr", "tp")}
            trials.append(item)
        out["trials"] = trials
        return out

    def write_curves(self, directory: str | os.PathLike, prefix: str = "") -> None:
        os.makedirs(directory, exist_ok=True)
        for i, tr in enumerate(self.trials):
            stem = os.path.join(directory, f"{prefix}trial{i:02d}")
            fpr, tpr = tr.roc
            keep = _thin(len(fpr))
            write_csv(f"{stem}_roc.csv", ("fpr", "tpr"), (fpr[keep], tpr[keep]))
            rec, prec = tr.pr
            keep = _thin(len(rec))
            write_csv(f"{stem}_pr.csv", ("recall", "precision"), (rec[keep], prec[keep]))
            rank, tp = tr.tp_at_rank
            keep = _thin(len(rank))
            write_csv(f"{stem}_tp.csv", ("rank", "tp"), (rank[keep], tp[keep]))


def _provenance(method: Method, plan: FoldPlan | None, extra: dict | None = None) -> dict:
    prov = {"method": method_id(method), "method_spec": method.__dict__.copy()}
    if plan is not None:
        prov["fold_plan"] = plan.__dict__.copy()
    if extra:
        prov.update(extra)
    return prov


# --------------------------------------------------------------------------
# drivers


def sweep_time(
    g: Graph,
    plan: FoldPlan,
    method: Method,
    times: Sequence[float],
    workers: int = 1,
) -> list[EvaluationReport]:
    """Evaluate ``method`` at each time on shared folds, diagonalizing once per walker and trial."""
    times = [float(t) for t in times]
    if not times or any(t < 0 for t in times):
        raise ValueError("times must be a non-empty list of non-negative values")
    per_time: list[list[TrialResult]] = [[] for _ in times]
    for trial in make_folds(g, plan):
        for i, table in enumerate(score_tables(method, trial.observed, times, workers)):
            per_time[i].append(evaluate_ranking(table, trial))
    return [
        EvaluationReport(method_id(method), t, res, _provenance(method, plan))
        for t, res in zip(times, per_time)
    ]


def run_crossval(g: Graph, plan: FoldPlan, method: Method, t: float = 1.0, workers: int = 1) -> EvaluationReport:
    return sweep_time(g, plan, method, [t], workers)[0]


def sweep_swarm_size_both(
    g: Graph,
    plan: FoldPlan,
    sampler: SamplerSpec,
    sizes: Sequence[int],
    t: float = 1.0,
    workers: int = 1,
) -> dict[bool, list[EvaluationReport]]:
    """Chiral-only (``False``) and nc-including (``True``) reports for each swarm size."""
    sizes = [int(m) for m in sizes]
    if not sizes:
        raise ValueError("need at least one swarm size")
    results = {flag: {m: [] for m in sizes} for flag in (False, True)}
    for trial in make_folds(g, plan):
        tables = swarm_size_prefixes(trial.observed, sampler, sizes, t, workers)
        for flag in (False, True):
            for m in sizes:
                if m in tables[flag]:
                    results[flag][m].append(evaluate_ranking(tables[flag][m], trial))
    out = {}
    for flag in (False, True):
        reports = []
        for m in sizes:
            meth = QuantumWalkMethod(sampler.kind if m else None, m, flag, sampler.seed) if (m or flag) else None
            if meth is None:
                continue
            reports.append(EvaluationReport(meth.method_id, t, results[flag][m], _provenance(meth, plan)))
        out[flag] = reports
    return out


def sweep_swarm_size(
    g: Graph,
    plan: FoldPlan,
    sampler: SamplerSpec,
    sizes: Sequence[int],
    t: float = 1.0,
    include_nonchiral: bool = False,
    workers: int = 1,
) -> list[EvaluationReport]:
    if not include_nonchiral and 0 in sizes:
        raise ValueError("a swarm of size 0 needs the nc walker")
    return sweep_swarm_size_both(g, plan, sampler, sizes, t, workers)[include_nonchiral]


# --------------------------------------------------------------------------
# AP@k and version comparison


@dataclass(frozen=True)
class PrecisionAtK:
    value: float
    hits: int
    k: int

    @property
    def found(self) -> bool:
        return self.hits > 0

    def display(self) -> str:
        return repr(self.value) if self.found else "--"


def average_precision_at_k(ranking: Sequence, relevant: Iterable, k: int) -> PrecisionAtK:
    """``(1/r_k) * sum_{i<=k} (r_i / i) * rel(i)``; zero with ``found=False`` if nothing hits."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if len(ranking) < k:
        raise ValueError(f"ranking has {len(ranking)} items, fewer than k={k}")
    relevant = set(relevant)
    # exact rational sum, rounded once, so hand-computable cases come out exact
    hits, total = 0, Fraction(0)
    for i, item in enumerate(ranking[:k], start=1):
        if item in relevant:
            hits += 1
            total += Fraction(hits, i)
    return PrecisionAtK(float(total / hits) if hits else 0.0, hits, k)


@dataclass
class VersionComparison:
    method: str
    t: float
    k: int
    ap: PrecisionAtK
    num_relevant: int
    top: list[tuple[str, str, float, bool]]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "t": self.t,
            "k": self.k,
            "ap_at_k": self.ap.value if self.ap.found else None,
            "ap_at_k_display": self.ap.display(),
            "hits_in_top_k": self.ap.hits,
            "links_found": self.ap.found,
            "num_relevant": self.num_relevant,
        }


def new_links(g_old: Graph, g_new: Graph) -> set[tuple[int, int]]:
    """Edges of ``g_new`` between nodes of ``g_old`` that ``g_old`` lacks, as old indices."""
    index = g_old.index_of()
    shared = [lab for lab in g_new.labels if lab in index]
    if not shared:
        raise ValueError("the two graph versions share no node labels")
    old_edges = g_old.edge_set()
    out = set()
    for u, v in g_new.edges:
        a, b = index.get(g_new.labels[u]), index.get(g_new.labels[v])
        if a is None or b is None:
            continue
        pair = (min(a, b), max(a, b))
        if pair not in old_edges:
            out.add(pair)
    return out


def compare_versions(
    g_old: Graph,
    g_new: Graph,
    method: Method,
    t: float = 1.0,
    k: int = 100,
    workers: int = 1,
) -> VersionComparison:
    relevant = new_links(g_old, g_new)
    table = score_tables(method, g_old, [t], workers)[0]
    order = table.ranking()
    rows, cols = table.rows[order], table.cols[order]
    ranking = list(zip(rows.tolist(), cols.tolist()))
    kk = min(k, len(ranking))
    ap = average_precision_at_k(ranking, relevant, kk) if kk else PrecisionAtK(0.0, 0, 0)
    lab = g_old.labels
    top = [
        (lab[u], lab[v], float(table.values[i]), (u, v) in relevant)
        for (u, v), i in zip(ranking[:kk], order[:kk])
    ]
    return VersionComparison(method_id(method), t, k, ap, len(relevant), top)


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")
