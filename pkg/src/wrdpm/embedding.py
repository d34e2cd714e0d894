"""Inverse problem: fit latent vectors to an observed weighted network.

Minimizes the off-diagonal Frobenius discrepancy between X X^T and the
adjacency matrix by alternating a rank-d PSD eigentruncation with a
diagonal update (the free quantity in the fixed point iteration).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedGraph
from .specialize import canonical_orientation


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 500
    tolerance: float = 1e-8
    diagonal_init: str = "degree-mean"  # or "zeros"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.diagonal_init not in ("degree-mean", "zeros"):
            raise ValueError(f"unknown diagonal_init {self.diagonal_init!r}")


@dataclass(frozen=True)
class Embedding:
    """n x d latent vectors with the fit diagnostics of the solve."""

    X: np.ndarray
    d: int
    residual: float
    iterations: int
    converged: bool
    residual_history: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        x = np.asarray(self.X, dtype=float)
        x.setflags(write=False)
        object.__setattr__(self, "X", x)


def residual(g: WeightedGraph, x: np.ndarray) -> float:
    """Off-diagonal Frobenius error between X X^T and the adjacency matrix."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != g.n:
        raise ValueError(f"X has {x.shape[0]} rows for an {g.n}-node graph")
    diff = x @ x.T - g.weights
    np.fill_diagonal(diff, 0.0)
    return float(np.linalg.norm(diff))


def _truncated_factor(a_hat: np.ndarray, d: int) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(a_hat)
    eigvals = np.clip(eigvals, 0.0, None)
    order = np.argsort(eigvals)[::-1][:d]
    return eigvecs[:, order] * np.sqrt(eigvals[order])


def embed(g: WeightedGraph, d: int, config: SolverConfig | None = None) -> Embedding:
    """Iteratively factor the adjacency matrix at rank d.

    Each step eigentruncates the diagonal-completed matrix to the best
    rank-d PSD approximation, then feeds the resulting diagonal back in.
    Convergence is declared when the diagonal stops moving; on hitting the
    iteration cap the best X seen so far is returned with converged=False.
    """
    if config is None:
        config = SolverConfig()
    n = g.n
    if not 1 <= d <= n:
        raise ValueError(f"embedding dimension d={d} outside [1, {n}]")
    a_hat = g.weights.copy()
    if config.diagonal_init == "degree-mean":
        diag = g.weights.sum(axis=1) / max(n - 1, 1)
    else:
        diag = np.zeros(n)
    np.fill_diagonal(a_hat, diag)

    best_x = None
    best_res = np.inf
    history = []
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        x = _truncated_factor(a_hat, d)
        res = residual(g, x)
        history.append(res)
        if res < best_res:
            best_res = res
            best_x = x
        new_diag = np.einsum("ij,ij->i", x, x)
        change = np.linalg.norm(new_diag - np.diag(a_hat))
        np.fill_diagonal(a_hat, new_diag)
        if change < config.tolerance:
            converged = True
            break

    return Embedding(
        X=canonical_orientation(best_x),
        d=d,
        residual=best_res,
        iterations=iterations,
        converged=converged,
        residual_history=tuple(history),
    )
