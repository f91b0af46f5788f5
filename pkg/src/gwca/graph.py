"""Graph container, Laplacian construction, matrix powers, and pair padding.

Everything is dense float64: the graphs this library targets have tens of
nodes, where dense algebra beats any sparse backend.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidGraphError, SizeMismatchError

SYMMETRY_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph with one feature row per node.

    adjacency : (n, n) symmetric matrix, nonnegative weights, zero diagonal.
        Asymmetry up to ``SYMMETRY_TOL`` is averaged away; anything larger is
        rejected rather than silently fixed.
    features  : (n, d) real matrix, d >= 1.

    Instances are immutable (arrays are marked read-only) and safe to share
    across threads.
    """

    adjacency: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=float)
        feat = np.array(self.features, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InvalidGraphError(f"adjacency must be square, got shape {adj.shape}")
        n = adj.shape[0]
        if n == 0:
            raise InvalidGraphError("graph needs at least one node")
        if not np.all(np.isfinite(adj)):
            raise InvalidGraphError("adjacency contains non-finite entries")
        asym = float(np.abs(adj - adj.T).max())
        if asym > SYMMETRY_TOL:
            raise InvalidGraphError(
                f"adjacency asymmetry {asym:.3e} exceeds tolerance {SYMMETRY_TOL:.0e}"
            )
        adj = (adj + adj.T) / 2.0
        if np.any(adj < 0):
            raise InvalidGraphError("adjacency weights must be nonnegative")
        if np.any(np.diag(adj) != 0):
            raise InvalidGraphError("adjacency diagonal must be exactly zero")
        if feat.ndim != 2 or feat.shape[0] != n or feat.shape[1] < 1:
            raise InvalidGraphError(
                f"features must have shape ({n}, d>=1), got {feat.shape}"
            )
        if not np.all(np.isfinite(feat)):
            raise InvalidGraphError("features contain non-finite entries")
        object.__setattr__(self, "adjacency", _frozen(adj))
        object.__setattr__(self, "features", _frozen(feat))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class Laplacian:
    """Graph Laplacian matrix.

    Symmetry is enforced here; the spectral invariants (PSD, and eigenvalues
    in [0, 2] for the normalized form) follow from construction via
    ``build_laplacian`` and are verified by the test suite, since checking
    them would cost an eigendecomposition per instance.
    """

    matrix: np.ndarray
    normalized: bool

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidGraphError(f"Laplacian must be square, got shape {m.shape}")
        asym = float(np.abs(m - m.T).max())
        if asym > SYMMETRY_TOL:
            raise InvalidGraphError(
                f"Laplacian asymmetry {asym:.3e} exceeds tolerance {SYMMETRY_TOL:.0e}"
            )
        object.__setattr__(self, "matrix", _frozen((m + m.T) / 2.0))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def build_laplacian(g: Graph, normalized: bool = True) -> Laplacian:
    """Build D - A or its symmetric normalization I - D^{-1/2} A D^{-1/2}.

    D is the diagonal degree matrix with D_ii = sum_j A_ij.  Zero degrees use
    the pseudo-inverse convention (D^{-1/2} maps 0 to 0), so isolated nodes
    contribute identity rows to the normalized form, which keeps it
    symmetric PSD.
    """
    degrees = g.adjacency.sum(axis=1)
    if not normalized:
        return Laplacian(np.diag(degrees) - g.adjacency, normalized=False)
    dinv = np.zeros_like(degrees)
    positive = degrees > 0
    dinv[positive] = 1.0 / np.sqrt(degrees[positive])
    mat = np.eye(g.n) - dinv[:, None] * g.adjacency * dinv[None, :]
    return Laplacian(mat, normalized=True)


def laplacian_powers(lap: Laplacian, k_max: int) -> list[np.ndarray]:
    """Return [L^0, L^1, ..., L^k_max] by repeated multiplication."""
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    powers = [np.eye(lap.n)]
    for _ in range(k_max):
        powers.append(powers[-1] @ lap.matrix)
    return powers


def pad_graph(g: Graph, n: int) -> Graph:
    """Extend g to n nodes with isolated nodes carrying all-zero features."""
    if n < g.n:
        raise SizeMismatchError(f"cannot pad graph of {g.n} nodes down to {n}")
    if n == g.n:
        return g
    extra = n - g.n
    adjacency = np.pad(g.adjacency, ((0, extra), (0, extra)))
    features = np.pad(g.features, ((0, extra), (0, 0)))
    return Graph(adjacency, features)


def pad_pair(g1: Graph, g2: Graph) -> tuple[Graph, Graph]:
    """Align node counts by padding the smaller graph with isolated nodes.

    Feature dimensions are untouched; padding is idempotent.
    """
    n = max(g1.n, g2.n)
    return pad_graph(g1, n), pad_graph(g2, n)
