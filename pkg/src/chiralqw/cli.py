"""Batch command line interface.

Every command writes one run directory ``<out>/<command>-<timestamp>-<hash>``
holding ``report.json`` plus CSV/TSV outputs. Those files depend only on the
resolved configuration and the input files; wall-clock timing and the thread
width go to ``runtime.json``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import shutil
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .baselines import BASELINES, BaselineSpec
from .distances import swarm_distance_distribution
from .evaluation import (
    FoldPlan,
    QuantumWalkMethod,
    compare_versions,
    dump_json,
    make_folds,
    score_tables,
    sweep_swarm_size_both,
    sweep_time,
    write_csv,
)
from .graph import EdgeListError, canonicalize, compute_stats, normalize_stats, parse_edge_list
from .walks import SamplerSpec, sampler_kind

THREADS_ENV = "CHIRALQW_THREADS"


class CommandError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = ""
    input: list[str] = field(default_factory=list)
    input_new: str | None = None
    delimiter: str | None = None
    columns: list[int] = field(default_factory=lambda: [0, 1])
    skip_header: int = 0
    method: str = "swarm"
    sampler: str = "quarter_pi_balanced"
    walkers: int = 10
    include_nc: bool = True
    time: float = 1.0
    times: list[float] = field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0, 4.0, 8.0])
    walkers_list: list[int] = field(default_factory=lambda: [1, 2, 5, 10, 15])
    removal: float | None = None
    repeats: int | None = None
    fold: int = 0
    seed: int = 0
    spm_p_h: float = 0.1
    spm_runs: int = 10
    top_k: int | None = None
    save_scores: bool = False
    which: str = "pairwise"
    threads: int = 1
    out: str = "runs"

    # excluded from the echo and hash: they do not change primary outputs
    RUNTIME_ONLY = ("threads", "out")

    def echo(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in self.RUNTIME_ONLY}

    def digest(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:10]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with option values; flags override it")
    common.add_argument("--input", action="append", help="edge-list file (repeat for several)")
    common.add_argument("--delimiter", help="column separator (default: any whitespace)")
    common.add_argument("--columns", type=_ints, help="0-based node columns, e.g. 0,1")
    common.add_argument("--skip-header", type=int, dest="skip_header", help="leading lines to ignore")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help=f"worker width (default: ${THREADS_ENV} or 1)")
    common.add_argument("--out", help="base output directory")

    method = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    method.add_argument(
        "--method",
        help="comma-separated: nc, swarm, swarm:<sampler>, " + ", ".join(BASELINES),
    )
    method.add_argument("--sampler", help="uniform_full | quarter_pi_balanced | eighth_pi")
    method.add_argument("--walkers", type=int, help="chiral walkers per swarm")
    method.add_argument("--include-nc", dest="include_nc", action="store_true")
    method.add_argument("--no-include-nc", dest="include_nc", action="store_false")
    method.add_argument("--spm-p-h", dest="spm_p_h", type=float)
    method.add_argument("--spm-runs", dest="spm_runs", type=int)

    folds = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    folds.add_argument("--removal", type=float, help="removed edge fraction: 0.1, 0.2 or 0.5")
    folds.add_argument("--repeats", type=int)

    p = argparse.ArgumentParser(prog="chiralqw", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"chiralqw {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    quiet = {"argument_default": argparse.SUPPRESS}

    sub.add_parser("stats", parents=[common], **quiet, help="network statistics and normalized radar data")

    sp = sub.add_parser("predict", parents=[common, method], **quiet, help="rank the non-edges of one graph")
    sp.add_argument("--time", type=float)
    sp.add_argument("--top-k", dest="top_k", type=int)
    sp.add_argument("--save-scores", dest="save_scores", action="store_true")

    sp = sub.add_parser("crossval", parents=[common, method, folds], **quiet, help="k-fold edge-removal evaluation")
    sp.add_argument("--time", type=float)

    sp = sub.add_parser("sweep-time", parents=[common, method, folds], **quiet, help="metrics over evolution times")
    sp.add_argument("--times", type=_floats)

    sp = sub.add_parser("sweep-swarm", parents=[common, method, folds], **quiet, help="metrics over swarm sizes")
    sp.add_argument("--walkers-list", dest="walkers_list", type=_ints)
    sp.add_argument("--time", type=float)

    sp = sub.add_parser("compare-versions", parents=[common, method], **quiet, help="AP@k of old graph against a newer version")
    sp.add_argument("--input-new", dest="input_new")
    sp.add_argument("--time", type=float)
    sp.add_argument("--top-k", dest="top_k", type=int)

    sp = sub.add_parser("distances", parents=[common, method, folds], **quiet, help="quantum-classical / walker-walker distances")
    sp.add_argument("--which", choices=("qc", "pairwise"))
    sp.add_argument("--time", type=float)
    sp.add_argument("--fold", type=int, help="trial index used when --removal is given")
    return p


def resolve_config(argv: list[str] | None = None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    values: dict = {}
    env_threads = os.environ.get(THREADS_ENV)
    if env_threads:
        values["threads"] = int(env_threads)
    path = args.pop("config", None)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                values.update(json.load(fh))
        except FileNotFoundError:
            raise CommandError(f"config file not found: {path}") from None
    values.update(args)
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise CommandError(f"unknown configuration keys: {', '.join(unknown)}")
    if isinstance(values.get("input"), str):
        values["input"] = [values["input"]]
    cfg = RunConfig(**values)
    cfg.sampler = sampler_kind(cfg.sampler)
    if cfg.top_k is None and cfg.command == "compare-versions":
        cfg.top_k = 100
    return cfg


# --------------------------------------------------------------------------


def load_graph(path: str, cfg: RunConfig):
    if not os.path.exists(path):
        raise CommandError(f"input file not found: {path}")
    try:
        g = parse_edge_list(path, cfg.delimiter, "#", tuple(cfg.columns), cfg.skip_header)
    except EdgeListError as exc:
        raise CommandError(f"{path}: {exc}") from None
    return canonicalize(g)


def methods_from(cfg: RunConfig) -> list:
    out = []
    for token in [m.strip() for m in cfg.method.split(",") if m.strip()]:
        name, _, arg = token.partition(":")
        if name.lower() == "nc":
            out.append(QuantumWalkMethod.nonchiral())
        elif name.lower() == "swarm":
            out.append(QuantumWalkMethod(arg or cfg.sampler, cfg.walkers, cfg.include_nc, cfg.seed))
        elif name.upper() in BASELINES:
            out.append(BaselineSpec(name, cfg.spm_p_h, cfg.spm_runs, cfg.seed))
        else:
            raise CommandError(f"unknown method {token!r}")
    if not out:
        raise CommandError("no method given")
    return out


def fold_plan(cfg: RunConfig, default: float = 0.1) -> FoldPlan:
    return FoldPlan.for_removal(cfg.removal or default, cfg.repeats, cfg.seed)


def _single_input(cfg: RunConfig) -> str:
    if len(cfg.input) != 1:
        raise CommandError(f"{cfg.command} takes exactly one --input")
    return cfg.input[0]


def cmd_stats(cfg: RunConfig, out: Path) -> dict:
    if not cfg.input:
        raise CommandError("stats needs at least one --input")
    names, stats = [], []
    for path in cfg.input:
        names.append(Path(path).stem)
        stats.append(compute_stats(load_graph(path, cfg)))
    cols = ["num_nodes", "num_edges", "mean_degree", "density", "mean_clustering"]
    write_csv(out / "stats.csv", ["network"] + cols, [np.array(names, dtype=object)] + [
        np.array([getattr(s, c) for s in stats]) for c in cols
    ])
    norm = normalize_stats(stats)
    write_csv(out / "radar.csv", ["network"] + cols, [np.array(names, dtype=object)] + [
        np.array([r[c] for r in norm]) for c in cols
    ])
    for name, s in zip(names, stats):
        print(f"{name}\t|V|={s.num_nodes}\t|E|={s.num_edges}\t<k>={s.mean_degree:.3f}"
              f"\trho={s.density:.4f}\tC={s.mean_clustering:.3f}")
    return {"networks": {n: asdict(s) for n, s in zip(names, stats)}}


def cmd_predict(cfg: RunConfig, out: Path) -> dict:
    g = load_graph(_single_input(cfg), cfg)
    (method,) = methods_from(cfg)
    table = score_tables(method, g, [cfg.time], cfg.threads)[0]
    table.write_top(out / "predictions.tsv", cfg.top_k)
    if cfg.save_scores:
        table.save(out / "scores.bin")
    return {"method": method.method_id, "nodes": g.n, "edges": g.num_edges, "non_edges": len(table)}


def cmd_crossval(cfg: RunConfig, out: Path) -> dict:
    return _time_reports(cfg, out, [cfg.time], curves=True)


def cmd_sweep_time(cfg: RunConfig, out: Path) -> dict:
    return _time_reports(cfg, out, cfg.times, curves=False)


def _time_reports(cfg: RunConfig, out: Path, times: list[float], curves: bool) -> dict:
    g = load_graph(_single_input(cfg), cfg)
    plan = fold_plan(cfg)
    result = {}
    rows = []
    for method in methods_from(cfg):
        reports = sweep_time(g, plan, method, times, cfg.threads)
        for rep in reports:
            s = rep.summary()
            rows.append((method.method_id, rep.t, s["auroc_mean"], s["auroc_std"], s["aupr_mean"], s["aupr_std"]))
        if curves:
            rep = reports[0]
            rep.write_curves(out / "curves", prefix=f"{method.method_id}_")
            result[method.method_id] = rep.to_dict(curve_dir=f"curves/{method.method_id}_")
        else:
            result[method.method_id] = [rep.to_dict() for rep in reports]
    cols = list(zip(*rows))
    write_csv(out / "summary.csv", ["method", "t", "auroc_mean", "auroc_std", "aupr_mean", "aupr_std"],
              [np.array(cols[0], dtype=object)] + [np.array(c) for c in cols[1:]])
    return {"nodes": g.n, "edges": g.num_edges, "fold_plan": asdict(plan), "reports": result}


def cmd_sweep_swarm(cfg: RunConfig, out: Path) -> dict:
    g = load_graph(_single_input(cfg), cfg)
    plan = fold_plan(cfg)
    sampler = SamplerSpec(cfg.sampler, cfg.seed)
    both = sweep_swarm_size_both(g, plan, sampler, cfg.walkers_list, cfg.time, cfg.threads)
    variants = (False, True) if cfg.include_nc else (False,)
    rows, result = [], {}
    for flag in variants:
        for rep in both[flag]:
            s = rep.summary()
            m = rep.provenance["method_spec"]["walkers"]
            rows.append(("tot" if flag else "c", m, s["auroc_mean"], s["auroc_std"], s["aupr_mean"], s["aupr_std"]))
            result[rep.method] = rep.to_dict()
    cols = list(zip(*rows))
    write_csv(out / "swarm.csv", ["variant", "walkers", "auroc_mean", "auroc_std", "aupr_mean", "aupr_std"],
              [np.array(cols[0], dtype=object)] + [np.array(c) for c in cols[1:]])
    return {"nodes": g.n, "edges": g.num_edges, "fold_plan": asdict(plan), "reports": result}


def cmd_compare_versions(cfg: RunConfig, out: Path) -> dict:
    g_old = load_graph(_single_input(cfg), cfg)
    if not cfg.input_new:
        raise CommandError("compare-versions needs --input-new")
    g_new = load_graph(cfg.input_new, cfg)
    result = {}
    for method in methods_from(cfg):
        try:
            cmp = compare_versions(g_old, g_new, method, cfg.time, cfg.top_k, cfg.threads)
        except ValueError as exc:
            raise CommandError(str(exc)) from None
        result[method.method_id] = cmp.to_dict()
        with open(out / f"top_{method.method_id}.tsv", "w", encoding="utf-8", newline="\n") as fh:
            for a, b, s, hit in cmp.top:
                fh.write(f"{a}\t{b}\t{s!r}\t{int(hit)}\n")
        print(f"{method.method_id}\tAP@{cfg.top_k}={cmp.ap.display()}"
              + ("" if cmp.ap.found else "\t(no links found)"))
    return {"results": result}


def cmd_distances(cfg: RunConfig, out: Path) -> dict:
    g = load_graph(_single_input(cfg), cfg)
    source = "full graph"
    if cfg.removal:
        trials = make_folds(g, fold_plan(cfg))
        if not 0 <= cfg.fold < len(trials):
            raise CommandError(f"--fold must lie in [0, {len(trials)})")
        g = trials[cfg.fold].observed
        source = f"observed graph of trial {cfg.fold} at removal {cfg.removal}"
    sampler = SamplerSpec(cfg.sampler, cfg.seed)
    rep = swarm_distance_distribution(g, sampler, cfg.walkers, cfg.time, cfg.which)
    if cfg.which == "qc":
        write_csv(out / "distances.csv", ["walker", "distance"],
                  [np.array([p[0] for p in rep.pairs]), rep.values])
    else:
        write_csv(out / "distances.csv", ["walker_l", "walker_m", "distance"],
                  [np.array([p[0] for p in rep.pairs]), np.array([p[1] for p in rep.pairs]), rep.values])
    return {"graph": source, "summary": rep.summary(), "provenance": rep.provenance}


COMMANDS = {
    "stats": cmd_stats,
    "predict": cmd_predict,
    "crossval": cmd_crossval,
    "sweep-time": cmd_sweep_time,
    "sweep-swarm": cmd_sweep_swarm,
    "compare-versions": cmd_compare_versions,
    "distances": cmd_distances,
}


def execute(cfg: RunConfig) -> Path:
    """Run one command; return the finished run directory.

    Outputs are assembled in a scratch directory and renamed into place only
    after the command succeeds.
    """
    base = Path(cfg.out)
    base.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
    name = f"{cfg.command}-{stamp}-{cfg.digest()}"
    scratch = Path(tempfile.mkdtemp(prefix=".partial-", dir=base))
    started = time.perf_counter()
    try:
        with threadpool_limits(limits=1):
            payload = COMMANDS[cfg.command](cfg, scratch)
        report = {"software": {"name": "chiralqw", "version": __version__},
                  "config": cfg.echo(), "result": payload}
        dump_json(report, scratch / "report.json")
        dump_json({"threads": cfg.threads, "started_utc": stamp,
                   "wall_seconds": time.perf_counter() - started}, scratch / "runtime.json")
        final = base / name
        suffix = 1
        while final.exists():
            final = base / f"{name}.{suffix}"
            suffix += 1
        os.rename(scratch, final)
    except BaseException:
        shutil.rmtree(scratch, ignore_errors=True)
        raise
    return final


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = resolve_config(argv)
        final = execute(cfg)
    except (CommandError, ValueError) as exc:
        print(f"chiralqw: error: {exc}", file=sys.stderr)
        return 1
    print(final)
    return 0


if __name__ == "__main__":
    sys.exit(main())
