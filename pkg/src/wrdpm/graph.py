"""Weighted graph container, validation, and edge-list / dense-CSV I/O."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

SYMMETRY_TOL = 1e-12


class GraphFormatError(ValueError):
    """A graph file failed to parse or an input violates a graph invariant."""


@dataclass(frozen=True)
class WeightedGraph:
    """Symmetric, nonnegative, zero-diagonal weighted adjacency matrix.

    Immutable after construction; the weight matrix is stored dense and
    marked read-only so the same graph can be shared across workers.
    """

    weights: np.ndarray
    node_labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise GraphFormatError(f"weight matrix must be square, got shape {w.shape}")
        if w.shape[0] < 1:
            raise GraphFormatError("graph must have at least one node")
        asym = np.abs(w - w.T).max() if w.size else 0.0
        if asym > SYMMETRY_TOL:
            raise GraphFormatError(f"weight matrix asymmetric (max |A - A^T| = {asym:g})")
        # Exact symmetry after the tolerance check, so downstream eigensolves
        # see a bit-symmetric matrix.
        w = (w + w.T) / 2.0
        if np.any(np.diag(w) != 0):
            raise GraphFormatError("diagonal entries must all be zero")
        if np.any(w < 0):
            raise GraphFormatError("negative edge weight")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.node_labels is not None:
            labels = tuple(str(s) for s in self.node_labels)
            if len(labels) != w.shape[0]:
                raise GraphFormatError(
                    f"{len(labels)} labels for {w.shape[0]} nodes"
                )
            object.__setattr__(self, "node_labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def labels(self) -> tuple[str, ...]:
        """Node labels, defaulting to stringified indices."""
        if self.node_labels is not None:
            return self.node_labels
        return tuple(str(j) for j in range(self.n))

    def is_integer_valued(self) -> bool:
        return bool(np.all(self.weights == np.round(self.weights)))


@dataclass(frozen=True)
class SymmetricOffDiagonal:
    """The C(n,2) off-diagonal entries of a symmetric matrix.

    The diagonal is undetermined (not zero); entries may be negative.
    Stored as a full symmetric matrix whose diagonal is ignored.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected square matrix, got shape {m.shape}")
        if np.abs(m - m.T).max() > SYMMETRY_TOL:
            raise ValueError("off-diagonal entries must be symmetric")
        m = (m + m.T) / 2.0
        np.fill_diagonal(m, 0.0)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "SymmetricOffDiagonal":
        """Take the off-diagonal part of ``m``, discarding its diagonal."""
        m = np.array(m, dtype=float)
        out = m.copy()
        np.fill_diagonal(out, 0.0)
        return cls(out)


def total_weight(g: WeightedGraph) -> float:
    """Sum of edge weights over unordered pairs."""
    return float(np.sum(np.triu(g.weights, k=1)))


def _parse_edge_list(lines: Sequence[str]) -> np.ndarray:
    declared_n = None
    edges = {}
    max_node = -1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            try:
                declared_n = int(line[2:])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: bad node-count header {line!r}")
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError(
                f"line {lineno}: expected '<u> <v> <w>', got {line!r}"
            )
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: could not parse {line!r}")
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative node id")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop on node {u}")
        if w < 0:
            raise GraphFormatError(f"line {lineno}: negative weight {w}")
        key = (min(u, v), max(u, v))
        if key in edges:
            raise GraphFormatError(f"line {lineno}: duplicate edge {key}")
        edges[key] = w
        max_node = max(max_node, u, v)
    n = max_node + 1
    if declared_n is not None:
        if declared_n < n:
            raise GraphFormatError(
                f"declared n={declared_n} but edge references node {max_node}"
            )
        n = declared_n
    if n < 1:
        raise GraphFormatError("empty edge list with no declared node count")
    weights = np.zeros((n, n))
    for (u, v), w in edges.items():
        weights[u, v] = weights[v, u] = w
    return weights


def load_graph(path, format: str = "edge-list") -> WeightedGraph:
    """Load a weighted graph from ``path`` in `edge-list` or `dense` format."""
    if format == "edge-list":
        with open(path, encoding="utf-8") as f:
            weights = _parse_edge_list(f.readlines())
        return WeightedGraph(weights)
    if format == "dense":
        try:
            weights = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise GraphFormatError(f"could not parse dense matrix: {exc}")
        return WeightedGraph(weights)
    raise ValueError(f"unknown graph format {format!r}")


def _fmt_weight(w: float) -> str:
    if w == int(w):
        return str(int(w))
    return repr(float(w))


def save_graph(g: WeightedGraph, path, format: str = "edge-list") -> None:
    """Write ``g`` so that load_graph reproduces it exactly."""
    if format == "edge-list":
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"n={g.n}\n")
            for j in range(g.n):
                for l in range(j + 1, g.n):
                    w = g.weights[j, l]
                    if w != 0:
                        f.write(f"{j} {l} {_fmt_weight(w)}\n")
    elif format == "dense":
        np.savetxt(path, g.weights, delimiter=",", fmt="%.17g")
    else:
        raise ValueError(f"unknown graph format {format!r}")
