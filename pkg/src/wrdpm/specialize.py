"""Classical edge-parametrized models realized as dot-product latent models.

Covers diagonal completion of a prescribed off-diagonal parameter matrix,
symmetric PSD factorization, and constructors for Erdos-Renyi, stochastic
block, and Chung-Lu models under either shipped weight family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import SymmetricOffDiagonal, WeightedGraph, total_weight
from .model import (
    Constant,
    DomainError,
    EdgeDistribution,
    FiniteSupport,
    LatentModel,
    Ray,
)


class NotPSDError(ValueError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


def complete_diagonal(
    m: SymmetricOffDiagonal, strategy: str = "dominant", delta: float = 1.0
) -> np.ndarray:
    """Choose diagonal entries making the completed matrix PD (or PSD).

    `dominant` sets each diagonal entry to the absolute row sum plus
    ``delta`` > 0, which forces strict diagonal dominance and hence all
    eigenvalues >= delta by the Gershgorin disc argument. `laplacian_abs`
    drops the delta margin and is guaranteed positive semidefinite only.
    """
    abs_row_sums = np.abs(m.entries).sum(axis=1)
    out = m.entries.copy()
    if strategy == "dominant":
        if delta <= 0:
            raise ValueError(f"delta must be positive, got {delta}")
        np.fill_diagonal(out, abs_row_sums + delta)
    elif strategy == "laplacian_abs":
        np.fill_diagonal(out, abs_row_sums)
    else:
        raise ValueError(f"unknown completion strategy {strategy!r}")
    return out


def canonical_orientation(x: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's first nonzero entry is nonnegative.

    The factor X is only determined up to orthogonal maps; this fixes a
    deterministic representative for tests and serialized output.
    """
    x = x.copy()
    for c in range(x.shape[1]):
        col = x[:, c]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if len(nz) and col[nz[0]] < 0:
            x[:, c] = -col
    return x


def factor_psd(
    m: np.ndarray, d: int | None = None, tol: float | None = None
) -> np.ndarray:
    """Factor a symmetric PSD matrix as X X^T with X of rank at most d.

    Uses the full symmetric eigendecomposition truncated to the top d
    eigenpairs (the Frobenius-optimal rank-d PSD approximation). Columns
    are ordered by descending eigenvalue and canonically oriented.
    Eigenvalues in (-tol, 0) are clamped to zero; anything below -tol is
    an error.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if d is None:
        d = n
    if not 1 <= d <= n:
        raise ValueError(f"rank cap d={d} outside [1, {n}]")
    if tol is None:
        tol = 1e-9 * max(np.linalg.norm(m), 1.0)
    eigvals, eigvecs = np.linalg.eigh(m)
    if eigvals[0] < -tol:
        raise NotPSDError(
            f"matrix is not PSD within tolerance: min eigenvalue {eigvals[0]:g}"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    order = np.argsort(eigvals)[::-1][:d]
    x = eigvecs[:, order] * np.sqrt(eigvals[order])
    return canonical_orientation(x)


def make_er(
    n: int, family: str = "poisson", theta: float = 1.0, d: int = 1
) -> LatentModel:
    """Erdos-Renyi style model: one constant vector with squared norm theta."""
    dist = EdgeDistribution(family)
    if dist.domain_violations(np.array([theta])).any() and not (
        family == "poisson" and theta == 0
    ):
        raise DomainError(f"parameter {theta} outside the {family} domain")
    if theta < 0:
        raise DomainError(f"parameter {theta} must be nonnegative")
    v = np.zeros(d)
    v[0] = np.sqrt(theta)
    return LatentModel(dist, n, (Constant(v),))


def fit_poisson_er(g: WeightedGraph) -> LatentModel:
    """Poisson Erdos-Renyi null model with the MLE rate total/C(n,2)."""
    if g.n < 2:
        raise ValueError("need at least 2 nodes to fit an edge-rate model")
    pairs = g.n * (g.n - 1) // 2
    lam = total_weight(g) / pairs
    return make_er(g.n, "poisson", lam)


@dataclass(frozen=True)
class BlockModelSpec:
    """b x b symmetric parameter matrix plus per-community sizes."""

    B: np.ndarray
    community_sizes: tuple[int, ...]

    def __post_init__(self):
        b_mat = np.atleast_2d(np.asarray(self.B, dtype=float))
        if b_mat.shape[0] != b_mat.shape[1]:
            raise ValueError("B must be square")
        if np.abs(b_mat - b_mat.T).max() > 1e-12:
            raise ValueError("B must be symmetric")
        sizes = tuple(int(z) for z in self.community_sizes)
        if len(sizes) != b_mat.shape[0]:
            raise ValueError("one size per community required")
        if any(z <= 0 for z in sizes):
            raise ValueError("community sizes must be positive")
        b_mat.setflags(write=False)
        object.__setattr__(self, "B", b_mat)
        object.__setattr__(self, "community_sizes", sizes)

    @property
    def b(self) -> int:
        return self.B.shape[0]

    @property
    def n(self) -> int:
        return sum(self.community_sizes)

    def assignment(self) -> np.ndarray:
        return np.repeat(np.arange(self.b), self.community_sizes)


def make_sbm(
    spec: BlockModelSpec,
    family: str = "poisson",
    magnitude_normalization: bool = False,
) -> LatentModel:
    """Block model as a finite-support latent model.

    With magnitude normalization on, the diagonal of B is replaced by
    n * (row sum of B) before factoring, giving every community vector a
    comparable magnitude; otherwise B itself must be PSD. Off-diagonal
    grid entries between distinct communities equal B exactly either way.
    """
    dist = EdgeDistribution(family)
    if dist.domain_violations(spec.B).any():
        raise DomainError(f"block parameters outside the {family} domain")
    b_mat = spec.B.copy()
    if magnitude_normalization:
        np.fill_diagonal(b_mat, spec.n * spec.B.sum(axis=1))
    x = factor_psd(b_mat)
    probs = np.asarray(spec.community_sizes, dtype=float) / spec.n
    src = FiniteSupport(x, probs, assignment=spec.assignment())
    return LatentModel(dist, spec.n, (src,))


@dataclass(frozen=True)
class ChungLuSpec:
    """Per-node expected-strength weights."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if np.any(w <= 0):
            raise ValueError("Chung-Lu weights must be positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def make_chung_lu(
    spec: ChungLuSpec, family: str = "bernoulli", d: int = 1
) -> LatentModel:
    """Chung-Lu model: node j gets w_j X0 with ||X0||^2 = 1/sum(w).

    Grid entry (j,l) is then w_j w_l / sum(w), the Chung-Lu edge parameter.
    """
    w = spec.weights
    w_sum = w.sum()
    if family == "bernoulli":
        top_two = np.sort(w)[-2:]
        worst = top_two[0] * top_two[1] / w_sum
        if worst >= 1:
            raise DomainError(
                f"max edge probability {worst:g} >= 1; weights too large for Bernoulli"
            )
    x0 = np.zeros(d)
    x0[0] = np.sqrt(1.0 / w_sum)
    return LatentModel(
        EdgeDistribution(family), spec.n, (Ray(x0, magnitudes=w),)
    )
