"""Graph-regularized softmax solver.

The objective on the probability simplex is

    f(x) = -<x, z> + <x, log x> + lambda * R(x)

where R is the graph total variation ||x - A~ x||_2 (optionally its squared
half). Plain softmax is the exact minimizer at lambda = 0; for lambda > 0
the minimum has no closed form and is found by projected gradient descent:
a fixed-size gradient step followed by Euclidean projection back onto the
simplex, stopping when successive iterates move less than ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from . import backend
from .graph import NormalizedAdjacency, Vocabulary
from .simplex import project_simplex

TV_VARIANTS = ("norm", "squared_norm")
INIT_MODES = ("softmax_of_z", "uniform")


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the projected-gradient solve.

    ``lam`` weighs the graph-TV penalty against the entropy + logits terms;
    ``tv_smoothing`` rounds off the norm variant's kink at x = A~ x, and
    ``log_floor`` clamps the log domain so boundary iterates stay finite.
    """

    lam: float = 1.0
    alpha: float = 1e-4
    max_iters: int = 20
    tol: float = 1e-4
    tv_smoothing: float = 1e-12
    log_floor: float = 1e-12
    tv_variant: str = "norm"
    init: str = "softmax_of_z"

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        for name in ("alpha", "tol", "tv_smoothing", "log_floor"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tv_variant not in TV_VARIANTS:
            raise ValueError(f"tv_variant must be one of {TV_VARIANTS}")
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}")


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Final iterate plus the per-step convergence trace.

    ``trace[t]`` is ||x_{t+1} - x_t||_2 for step t (1-based step t+1);
    ``objective_trace[t]`` is the objective at the new iterate. ``converged``
    means the last gap fell below the configured tolerance.
    """

    x: np.ndarray
    iterations: int
    converged: bool
    trace: Tuple[float, ...]
    objective_trace: Tuple[float, ...] = field(repr=False)
    objective_final: float = float("nan")


def logsumexp(x: np.ndarray) -> float:
    """log(sum(exp(x))) with the max shifted out, so huge inputs cannot overflow."""
    x = np.asarray(x, dtype=np.float64)
    m = float(np.max(x))
    return m + float(np.log(np.sum(np.exp(x - m))))


def softmax(z: np.ndarray) -> np.ndarray:
    """exp(z) / sum(exp(z)), computed with the max shifted out."""
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - np.max(z))
    return e / np.sum(e)


def _check_dim(x: np.ndarray, adj: NormalizedAdjacency) -> None:
    if x.shape[0] != adj.n:
        raise ValueError(f"dimension mismatch: vector has {x.shape[0]}, graph has {adj.n}")


def graph_tv(x: np.ndarray, adj: NormalizedAdjacency) -> float:
    """Graph total variation ||x - A~ x||_2 (unsmoothed)."""
    x = np.asarray(x, dtype=np.float64)
    _check_dim(x, adj)
    y = x - backend.matvec(adj.matrix, x)
    return float(np.sqrt(np.dot(y, y)))


def objective(
    x: np.ndarray, z: np.ndarray, adj: NormalizedAdjacency, cfg: SolverConfig
) -> float:
    """Objective value -<x,z> + <x, log max(x, floor)> + lam * R(x).

    The entropy term uses the x log x -> 0 convention at x = 0 (exact with
    the clamp, since 0 * log(floor) == 0). The norm variant of R is
    evaluated in its smoothed form sqrt(||x - A~x||^2 + tv_smoothing^2).
    """
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    _check_dim(x, adj)
    if z.shape[0] != x.shape[0]:
        raise ValueError("dimension mismatch: logits and point differ in length")
    val = -float(np.dot(x, z)) + float(np.dot(x, np.log(np.maximum(x, cfg.log_floor))))
    if cfg.lam != 0.0:
        y = x - backend.matvec(adj.matrix, x)
        sq = float(np.dot(y, y))
        if cfg.tv_variant == "norm":
            val += cfg.lam * float(np.sqrt(sq + cfg.tv_smoothing**2))
        else:
            val += cfg.lam * 0.5 * sq
    return val


def gradient(
    x: np.ndarray, z: np.ndarray, adj: NormalizedAdjacency, cfg: SolverConfig
) -> np.ndarray:
    """Gradient of the objective; all matrix products stay sparse.

    grad = -z + 1 + log(max(x, floor)) + lam * g_tv with
    g_tv = (I - A~)^T (I - A~) x, divided by the smoothed TV for the norm
    variant. (I - A~)^T (I - A~) is never materialized.
    """
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    _check_dim(x, adj)
    if z.shape[0] != x.shape[0]:
        raise ValueError("dimension mismatch: logits and point differ in length")
    g = -z + 1.0 + np.log(np.maximum(x, cfg.log_floor))
    if cfg.lam != 0.0:
        y = x - backend.matvec(adj.matrix, x)
        g_tv = y - backend.rmatvec(adj.matrix, y)
        if cfg.tv_variant == "norm":
            g_tv = g_tv / np.sqrt(float(np.dot(y, y)) + cfg.tv_smoothing**2)
        g = g + cfg.lam * g_tv
    return g


def _init_point(z: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    if cfg.init == "softmax_of_z":
        return softmax(z)
    return np.full(z.shape[0], 1.0 / z.shape[0], dtype=np.float64)


def graph_softmax(
    z: np.ndarray, adj: NormalizedAdjacency, cfg: SolverConfig | None = None
) -> SolveResult:
    """Minimize the graph-regularized objective by projected gradient descent.

    Starts from softmax(z) (or uniform), takes fixed-size gradient steps,
    projects each one back onto the simplex, and stops once the step gap
    ||x_{t+1} - x_t||_2 drops below ``cfg.tol`` or ``cfg.max_iters`` is hit.
    With lam = 0 and the softmax start, the first step is a fixed point:
    the gradient is constant and the projection absorbs constant shifts.
    """
    if cfg is None:
        cfg = SolverConfig()
    z = np.asarray(z, dtype=np.float64)
    _check_dim(z, adj)
    x = _init_point(z, cfg)
    trace: List[float] = []
    obj_trace: List[float] = []
    converged = False
    for _ in range(cfg.max_iters):
        g = gradient(x, z, adj, cfg)
        if not np.isfinite(g).all():
            raise FloatingPointError(
                "non-finite gradient; log_floor is too small for this input"
            )
        x_new = project_simplex(x - cfg.alpha * g)
        gap = float(np.linalg.norm(x_new - x))
        trace.append(gap)
        obj_trace.append(objective(x_new, z, adj, cfg))
        x = x_new
        if gap < cfg.tol:
            converged = True
            break
    return SolveResult(
        x=x,
        iterations=len(trace),
        converged=converged,
        trace=tuple(trace),
        objective_trace=tuple(obj_trace),
        objective_final=obj_trace[-1],
    )


def top_k(x: np.ndarray, vocab: Vocabulary, k: int) -> List[Tuple[str, float]]:
    """The k most probable tokens, descending; ties go to the smaller index."""
    x = np.asarray(x, dtype=np.float64)
    if not (1 <= k <= x.shape[0]):
        raise ValueError(f"k must be in [1, {x.shape[0]}], got {k}")
    if x.shape[0] != len(vocab):
        raise ValueError("dimension mismatch: point and vocabulary differ in length")
    order = np.argsort(-x, kind="stable")[:k]
    return [(vocab.words[int(i)], float(x[int(i)])) for i in order]


def objective_hessian(
    x: np.ndarray, adj: NormalizedAdjacency, cfg: SolverConfig
) -> np.ndarray:
    """Dense Hessian of the objective at an interior point (test scale only).

    diag(1/x) plus lam times the TV curvature: B = (I - A~)^T (I - A~) for
    the squared variant; for the norm variant B/R - (Bx)(Bx)^T / R^3 with
    R the smoothed TV, which is positive semidefinite by Cauchy-Schwarz.
    """
    x = np.asarray(x, dtype=np.float64)
    _check_dim(x, adj)
    n = x.shape[0]
    hess = np.diag(1.0 / np.maximum(x, cfg.log_floor))
    if cfg.lam != 0.0:
        eye_minus = np.eye(n) - adj.matrix.toarray()
        big_b = eye_minus.T @ eye_minus
        if cfg.tv_variant == "squared_norm":
            hess += cfg.lam * big_b
        else:
            bx = big_b @ x
            r = np.sqrt(float(x @ big_b @ x) + cfg.tv_smoothing**2)
            hess += cfg.lam * (big_b / r - np.outer(bx, bx) / r**3)
    return hess
