"""Link prediction with swarms of chiral continuous-time quantum walks."""

from .baselines import BaselineSpec, baseline_score, spm_perturbed_matrix
from .distances import (
    DistanceReport,
    global_max_over_sources,
    quantum_classical_distance,
    swarm_distance_distribution,
    walker_distance,
)
from .evaluation import (
    EvaluationReport,
    FoldPlan,
    QuantumWalkMethod,
    Trial,
    average_precision_at_k,
    compare_versions,
    evaluate_ranking,
    make_folds,
    run_crossval,
    sweep_swarm_size,
    sweep_time,
)
from .graph import Graph, GraphStats, canonicalize, compute_stats, normalize_stats, parse_edge_list
from .scoring import ScoreTable, score_single, swarm_score
from .walks import (
    ChiralGenerator,
    Propagator,
    SamplerSpec,
    build_generator,
    classical_transition_matrix,
    diagonalize,
    sample_phases,
    transition_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "average_precision_at_k",
    "baseline_score",
    "BaselineSpec",
    "build_generator",
    "canonicalize",
    "ChiralGenerator",
    "classical_transition_matrix",
    "compare_versions",
    "compute_stats",
    "diagonalize",
    "DistanceReport",
    "evaluate_ranking",
    "EvaluationReport",
    "FoldPlan",
    "global_max_over_sources",
    "Graph",
    "GraphStats",
    "make_folds",
    "normalize_stats",
    "parse_edge_list",
    "Propagator",
    "quantum_classical_distance",
    "QuantumWalkMethod",
    "run_crossval",
    "sample_phases",
    "SamplerSpec",
    "score_single",
    "ScoreTable",
    "spm_perturbed_matrix",
    "swarm_distance_distribution",
    "swarm_score",
    "sweep_swarm_size",
    "sweep_time",
    "transition_matrix",
    "Trial",
    "walker_distance",
]
