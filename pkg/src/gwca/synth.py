"""Deterministic data generators: correlated cross-view graph pairs for
end-to-end validation, and similarity graphs built from per-node embedding
matrices.

All randomness flows through ``numpy.random.default_rng`` (PCG64) seeded
from the config, so identical configs produce bit-identical output.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidGraphError
from .graph import Graph


@dataclass(frozen=True)
class SynthConfig:
    """Configuration for correlated cross-view pair generation.

    View-2 features are X1 @ T + noise * N(0,1) on the same node set and
    topology (optionally with a fraction of edges resampled), where T is the
    mixing matrix: "orthogonal" draws one with orthonormal columns/rows,
    "gaussian" a dense random one, or pass an explicit (d1, d2) array.
    """

    pairs: int
    nodes: tuple[int, int] = (10, 30)
    d1: int = 8
    d2: int = 8
    noise: float = 0.0
    density: float = 0.3
    mixing: object = "orthogonal"
    edge_noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.nodes
        if self.pairs < 0:
            raise ValueError(f"pairs must be >= 0, got {self.pairs}")
        if not (1 <= lo <= hi):
            raise ValueError(f"node range must satisfy 1 <= lo <= hi, got {self.nodes}")
        if self.d1 < 1 or self.d2 < 1:
            raise ValueError("feature dimensions must be >= 1")
        if self.noise < 0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")
        if not (0 < self.density <= 1):
            raise ValueError(f"density must be in (0, 1], got {self.density}")
        if not (0 <= self.edge_noise <= 1):
            raise ValueError(f"edge_noise must be in [0, 1], got {self.edge_noise}")
        if isinstance(self.mixing, str):
            if self.mixing not in ("orthogonal", "gaussian"):
                raise ValueError(f"unknown mixing spec {self.mixing!r}")
        else:
            t = np.asarray(self.mixing, dtype=float)
            if t.shape != (self.d1, self.d2):
                raise ValueError(
                    f"mixing matrix must be ({self.d1}, {self.d2}), got {t.shape}"
                )


def random_graph(
    rng: np.random.Generator,
    n: int,
    density: float = 0.3,
    d: int = 1,
    weight_range: tuple[float, float] = (0.5, 1.5),
) -> Graph:
    """Random weighted graph: each undirected pair is an edge with the given
    probability, weights uniform in weight_range, features standard normal."""
    adjacency = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                w = rng.uniform(*weight_range)
                adjacency[i, j] = adjacency[j, i] = w
    return Graph(adjacency, rng.standard_normal((n, d)))


def mixing_matrix(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    if isinstance(cfg.mixing, str):
        if cfg.mixing == "orthogonal":
            gauss = rng.standard_normal((max(cfg.d1, cfg.d2), min(cfg.d1, cfg.d2)))
            q, _ = np.linalg.qr(gauss)
            return q if cfg.d1 >= cfg.d2 else q.T
        if cfg.mixing == "gaussian":
            return rng.standard_normal((cfg.d1, cfg.d2)) / np.sqrt(cfg.d1)
        raise ValueError(f"unknown mixing spec {cfg.mixing!r}")
    t = np.asarray(cfg.mixing, dtype=float)
    if t.shape != (cfg.d1, cfg.d2):
        raise ValueError(f"mixing matrix must be ({cfg.d1}, {cfg.d2}), got {t.shape}")
    return t


def _perturb_edges(adjacency: np.ndarray, fraction: float, rng: np.random.Generator) -> np.ndarray:
    out = adjacency.copy()
    n = out.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < fraction:
                w = rng.uniform(0.5, 1.5) if rng.random() < 0.5 else 0.0
                out[i, j] = out[j, i] = w
    return out


def generate_pairs(cfg: SynthConfig) -> list[tuple[Graph, Graph]]:
    """Generate the configured matched pairs; node orders of the two views
    are aligned by construction."""
    rng = np.random.default_rng(cfg.seed)
    t = mixing_matrix(cfg, rng)
    lo, hi = cfg.nodes
    pairs = []
    for _ in range(cfg.pairs):
        n = int(rng.integers(lo, hi + 1))
        g1 = random_graph(rng, n, cfg.density, cfg.d1)
        x2 = g1.features @ t
        if cfg.noise > 0:
            x2 = x2 + cfg.noise * rng.standard_normal((n, cfg.d2))
        a2 = g1.adjacency
        if cfg.edge_noise > 0:
            a2 = _perturb_edges(a2, cfg.edge_noise, rng)
        pairs.append((g1, Graph(a2, x2)))
    return pairs


@dataclass(frozen=True)
class EmbeddingGraphConfig:
    """How to connect embedding rows into a similarity graph.

    Exactly one of ``threshold`` (keep pairs with cosine similarity above
    tau) or ``top_m`` (keep each row's m most similar neighbours, union over
    directions) is in effect; negative similarities never become edges
    either way, since edge weights must stay nonnegative.
    """

    threshold: float | None = None
    top_m: int | None = None

    def __post_init__(self):
        if (self.threshold is None) == (self.top_m is None):
            raise ValueError("set exactly one of threshold or top_m")
        if self.threshold is not None and not (-1.0 <= self.threshold <= 1.0):
            raise ValueError(f"threshold must be in [-1, 1], got {self.threshold}")
        if self.top_m is not None and self.top_m < 1:
            raise ValueError(f"top_m must be >= 1, got {self.top_m}")


def build_embedding_graph(embeddings: np.ndarray, cfg: EmbeddingGraphConfig) -> Graph:
    """Similarity graph over embedding rows: nodes are rows, edge weights
    the pairwise cosine similarities (clamped into (0, 1]), features the
    embeddings themselves."""
    emb = np.asarray(embeddings, dtype=float)
    if emb.ndim != 2 or emb.shape[0] < 1:
        raise InvalidGraphError(f"embeddings must be a nonempty 2-D matrix, got {emb.shape}")
    if not np.all(np.isfinite(emb)):
        raise InvalidGraphError("embeddings contain non-finite entries")
    norms = np.linalg.norm(emb, axis=1)
    zero_rows = np.flatnonzero(norms == 0)
    if zero_rows.size:
        raise InvalidGraphError(
            f"embedding row {int(zero_rows[0])} has zero norm; cosine similarity undefined"
        )
    unit = emb / norms[:, None]
    sims = unit @ unit.T
    sims = np.clip((sims + sims.T) / 2.0, -1.0, 1.0)
    n = emb.shape[0]
    if cfg.threshold is not None:
        keep = sims > cfg.threshold
    else:
        keep = np.zeros((n, n), dtype=bool)
        m = min(cfg.top_m, n - 1)
        if m > 0:
            masked = sims.copy()
            np.fill_diagonal(masked, -np.inf)
            for i in range(n):
                neighbours = np.argsort(-masked[i], kind="stable")[:m]
                keep[i, neighbours] = True
            keep |= keep.T
    keep &= sims > 0
    np.fill_diagonal(keep, False)
    adjacency = np.where(keep, sims, 0.0)
    return Graph(adjacency, emb)
