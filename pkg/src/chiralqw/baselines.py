"""Classical similarity indices and the structural perturbation method."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .graph import Graph
from .scoring import ScoreTable

BASELINES = ("CN", "AA", "PA", "L3", "SPM")


@dataclass(frozen=True)
class BaselineSpec:
    kind: str
    spm_p_h: float = 0.1
    spm_runs: int = 10
    seed: int = 0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in BASELINES:
            raise ValueError(f"unknown baseline {self.kind!r}; expected one of {BASELINES}")
        object.__setattr__(self, "kind", kind)
        if not 0.0 < self.spm_p_h < 1.0:
            raise ValueError("spm_p_h must lie in (0, 1)")
        if self.spm_runs < 1:
            raise ValueError("spm_runs must be at least 1")

    @property
    def method_id(self) -> str:
        if self.kind == "SPM":
            return f"SPM-p{self.spm_p_h:g}-r{self.spm_runs}"
        return self.kind


def _inv_sqrt(d: np.ndarray) -> np.ndarray:
    out = np.zeros(len(d))
    out[d > 0] = 1.0 / np.sqrt(d[d > 0])
    return out


def similarity_matrix(g: Graph, kind: str) -> np.ndarray:
    """Dense score matrix for the closed-form indices (CN, AA, PA, L3)."""
    a = g.adjacency(sparse=True)
    d = g.degree.astype(float)
    if kind == "CN":
        m = a @ a
    elif kind == "AA":
        w = np.zeros(g.n)
        # degree-1 neighbours would give 1/ln(1); they cannot be shared by a non-edge
        w[d > 1] = 1.0 / np.log(d[d > 1])
        m = a @ sp.diags(w) @ a
    elif kind == "PA":
        return np.outer(d, d)
    elif kind == "L3":
        s = sp.diags(_inv_sqrt(d))
        m = a @ (s @ a @ s) @ a
    else:
        raise ValueError(f"no closed form for {kind!r}")
    return m.toarray()


def spm_perturbed_matrix(g: Graph, p_h: float, seed: int) -> np.ndarray:
    """First-order eigen-perturbed reconstruction of the adjacency matrix.

    A random fraction ``p_h`` of edges is held out as ``dA``; the rest,
    ``A_R = A - dA``, is diagonalized and each eigenvalue is shifted by
    ``x_k^T dA x_k`` with the eigenvectors kept fixed.
    """
    if g.num_edges < 2:
        raise ValueError("SPM needs at least two edges")
    if p_h * g.num_edges < 1:
        raise ValueError(f"p_h={p_h} selects no edge out of {g.num_edges}")
    count = math.ceil(p_h * g.num_edges)
    order = np.random.default_rng(seed).permutation(g.num_edges)
    return perturbed_reconstruction(g.adjacency(), g.edges[order[:count]])


def perturbed_reconstruction(a: np.ndarray, held: np.ndarray) -> np.ndarray:
    """``sum_k (lam_k + x_k^T dA x_k) x_k x_k^T`` over the eigenpairs of ``a - dA``."""
    held = np.asarray(held, dtype=np.int64).reshape(-1, 2)
    da = np.zeros_like(a)
    da[held[:, 0], held[:, 1]] = 1.0
    da[held[:, 1], held[:, 0]] = 1.0
    lam, x = la.eigh(a - da, check_finite=False)
    shift = np.sum(x * (da @ x), axis=0)
    return (x * (lam + shift)) @ x.T


def baseline_score(g: Graph, spec: BaselineSpec) -> ScoreTable:
    rows, cols = g.non_edges
    if spec.kind == "SPM":
        acc = np.zeros(len(rows))
        for r in range(1, spec.spm_runs + 1):
            acc += spm_perturbed_matrix(g, spec.spm_p_h, spec.seed ^ r)[rows, cols]
        vals = acc / spec.spm_runs
    else:
        vals = similarity_matrix(g, spec.kind)[rows, cols]
    return ScoreTable(g, vals, spec.method_id, float("nan"), 0, spec.seed)
