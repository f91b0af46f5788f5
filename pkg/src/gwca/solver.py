"""Correlation-matrix accumulation over matched graph pairs and the
closed-form projection solver.

Minimizing the summed quadratic distance bound over training pairs is, after
normalization, a canonical correlation problem between the two views; the
solver takes the numerically stable whitened-SVD route, whose output
satisfies the product eigen-equations

    inv(C1) C12 inv(C2) C21 w1 = rho^2 w1
    inv(C2) C21 inv(C1) C12 w2 = rho^2 w2

with columns normalized to w^T C w = 1 per view.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SizeMismatchError, SolverError
from .graph import Graph, build_laplacian, laplacian_powers, pad_pair
from .wasserstein import build_pair_kernels

DEFAULT_MAX_CHANNELS = 240
DEFAULT_REG_SCALE = 1e-6


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


@dataclass(frozen=True)
class CorrelationMatrices:
    """Accumulated kernel moments over M training pairs.

    ``k`` is the Laplacian power.  With ``fusion`` the per-power filtered
    features of powers 0..k are column-concatenated and the kernels are
    evaluated at power 0, which is algebraically identical to letting the
    learned weights span all powers in a single solve.
    """

    c1: np.ndarray
    c2: np.ndarray
    c12: np.ndarray
    pair_count: int
    k: int
    fusion: bool

    @property
    def c21(self) -> np.ndarray:
        return self.c12.T


@dataclass(frozen=True)
class CorrelationModel:
    """Learned projection pair.

    ``order`` counts polynomial terms: powers 0..order-1 under fusion,
    only the single power order-1 otherwise.  ``rho`` is descending in
    [0, 1]; column j of w1/w2 is the j-th channel's weight vector (length
    order*d under fusion, length d otherwise).  ``reg`` records the ridge
    actually applied (mean of the per-view values when auto-resolved).
    """

    w1: np.ndarray
    w2: np.ndarray
    rho: np.ndarray
    order: int
    fusion: bool
    reg: float
    d1: int
    d2: int

    def __post_init__(self):
        w1 = np.atleast_2d(np.asarray(self.w1, dtype=float))
        w2 = np.atleast_2d(np.asarray(self.w2, dtype=float))
        rho = np.asarray(self.rho, dtype=float).ravel()
        if w1.shape[1] != rho.size or w2.shape[1] != rho.size:
            raise ValueError("w1, w2 and rho disagree on the channel count")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "rho", rho)

    @property
    def channels(self) -> int:
        return self.rho.size

    def to_dict(self) -> dict:
        return {
            "order": int(self.order),
            "fusion": bool(self.fusion),
            "reg": float(self.reg),
            "channels": int(self.channels),
            "rho": [float(r) for r in self.rho],
            "w1": self.w1.tolist(),
            "w2": self.w2.tolist(),
            "d1": int(self.d1),
            "d2": int(self.d2),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CorrelationModel":
        model = cls(
            w1=np.array(d["w1"], dtype=float),
            w2=np.array(d["w2"], dtype=float),
            rho=np.array(d["rho"], dtype=float),
            order=int(d["order"]),
            fusion=bool(d["fusion"]),
            reg=float(d["reg"]),
            d1=int(d["d1"]),
            d2=int(d["d2"]),
        )
        if model.channels != int(d["channels"]):
            raise ValueError("channel count in file disagrees with matrix shapes")
        return model


def fused_features(g: Graph, k: int) -> np.ndarray:
    """Column-concatenation [L^0 X, L^1 X, ..., L^k X] using the normalized
    Laplacian; shape (n, (k+1) d)."""
    powers = laplacian_powers(build_laplacian(g), k)
    return np.hstack([p @ g.features for p in powers])


def pair_moments(
    g1: Graph, g2: Graph, k: int, fusion: bool
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One pair's contribution (P1, P2, P12) to the correlation matrices.

    Pads the pair to a common node count first.
    """
    g1, g2 = pad_pair(g1, g2)
    if fusion:
        y1 = fused_features(g1, k)
        y2 = fused_features(g2, k)
        eye = [np.eye(g1.n)]
        kernels = build_pair_kernels(eye, eye, 0)
    else:
        y1 = g1.features
        y2 = g2.features
        kernels = build_pair_kernels(
            laplacian_powers(build_laplacian(g1), k),
            laplacian_powers(build_laplacian(g2), k),
            k,
        )
    p1 = y1.T @ (kernels.k_mu1 + kernels.k_sigma1) @ y1
    p2 = y2.T @ (kernels.k_mu2 + kernels.k_sigma2) @ y2
    p12 = y1.T @ (kernels.k_mu12 + kernels.k_sigma12) @ y2
    return p1, p2, p12


def accumulate(
    pairs: list[tuple[Graph, Graph]],
    k: int,
    fusion: bool = True,
    threads: int = 1,
) -> CorrelationMatrices:
    """Sum per-pair kernel moments over the training pairs.

    k is the highest Laplacian power; fusion concatenates the filtered
    features of powers 0..k so one solve spans every receptive-field order,
    while fusion=False uses power k alone.  Per-pair moments are independent
    and may be computed in parallel; the reduction always runs in input
    order, so the result is deterministic.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one training pair")
    if k < 0:
        raise ValueError(f"Laplacian power must be >= 0, got {k}")
    d1, d2 = pairs[0][0].d, pairs[0][1].d
    for i, (g1, g2) in enumerate(pairs):
        if g1.d != d1 or g2.d != d2:
            raise SizeMismatchError(
                f"pair {i} has feature dims ({g1.d}, {g2.d}), expected ({d1}, {d2})"
            )

    def worker(pair: tuple[Graph, Graph]):
        return pair_moments(pair[0], pair[1], k, fusion)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(worker, pairs))
    else:
        parts = [worker(p) for p in pairs]

    blocks = k + 1 if fusion else 1
    c1 = np.zeros((blocks * d1, blocks * d1))
    c2 = np.zeros((blocks * d2, blocks * d2))
    c12 = np.zeros((blocks * d1, blocks * d2))
    for p1, p2, p12 in parts:
        c1 += p1
        c2 += p2
        c12 += p12
    return CorrelationMatrices(_sym(c1), _sym(c2), c12, len(pairs), k, fusion)


def auto_reg(cm: CorrelationMatrices) -> tuple[float, float]:
    """Per-view default ridge: 1e-6 * trace/dim of each moment matrix."""
    return (
        DEFAULT_REG_SCALE * float(np.trace(cm.c1)) / cm.c1.shape[0],
        DEFAULT_REG_SCALE * float(np.trace(cm.c2)) / cm.c2.shape[0],
    )


def _inv_sqrt(mat: np.ndarray, view: str) -> np.ndarray:
    """Inverse symmetric square root, failing loudly on singular input."""
    values, vectors = np.linalg.eigh(mat)
    if values[0] <= 0 or values[0] < values[-1] * 1e-14:
        raise SolverError(
            f"regularized correlation matrix for {view} is numerically singular "
            f"(eigenvalue range [{values[0]:.3e}, {values[-1]:.3e}]); increase reg"
        )
    return (vectors / np.sqrt(values)) @ vectors.T


def solve(
    cm: CorrelationMatrices,
    reg: float | None = None,
    channels: int | None = None,
) -> CorrelationModel:
    """Closed-form maximizer of the summed pair correlation.

    Ridge eps is added to both view moments (reg=None resolves eps to
    1e-6 * trace/dim per view), then T = C1^{-1/2} C12 C2^{-1/2} is
    decomposed by SVD; back-transformed singular vectors satisfy the product
    eigen-equations with eigenvalue rho^2.  Channel signs are deterministic:
    each w1 column has its largest-magnitude entry positive, and the paired
    w2 column is flipped with it so the channel keeps positive correlation.
    """
    d_1 = cm.c1.shape[0]
    d_2 = cm.c2.shape[0]
    r = channels if channels is not None else min(d_1, d_2, DEFAULT_MAX_CHANNELS)
    if not 1 <= r <= min(d_1, d_2):
        raise ValueError(f"channels must be in [1, {min(d_1, d_2)}], got {r}")
    if reg is not None and reg < 0:
        raise ValueError(f"reg must be nonnegative, got {reg}")
    eps1, eps2 = (reg, reg) if reg is not None else auto_reg(cm)
    isq1 = _inv_sqrt(cm.c1 + eps1 * np.eye(d_1), "view 1")
    isq2 = _inv_sqrt(cm.c2 + eps2 * np.eye(d_2), "view 2")
    u, s, vt = np.linalg.svd(isq1 @ cm.c12 @ isq2)
    w1 = isq1 @ u[:, :r]
    w2 = isq2 @ vt[:r].T
    for j in range(r):
        if w1[np.abs(w1[:, j]).argmax(), j] < 0:
            w1[:, j] = -w1[:, j]
            w2[:, j] = -w2[:, j]
    blocks = cm.k + 1 if cm.fusion else 1
    return CorrelationModel(
        w1=w1,
        w2=w2,
        rho=s[:r],
        order=cm.k + 1,
        fusion=cm.fusion,
        reg=(eps1 + eps2) / 2.0,
        d1=d_1 // blocks,
        d2=d_2 // blocks,
    )


def project(model: CorrelationModel, g: Graph, view: int) -> np.ndarray:
    """Project one graph through the learned weights: (n, channels).

    Column j is the filtered signal L^k X w[:, j] (with the fused
    augmented features when the model was trained in fusion mode).
    """
    if view not in (1, 2):
        raise ValueError(f"view must be 1 or 2, got {view}")
    w = model.w1 if view == 1 else model.w2
    expected = model.d1 if view == 1 else model.d2
    if g.d != expected:
        raise SizeMismatchError(
            f"view {view} expects {expected} feature channels, graph has {g.d}"
        )
    if model.fusion:
        y = fused_features(g, model.order - 1)
    else:
        y = laplacian_powers(build_laplacian(g), model.order - 1)[-1] @ g.features
    return y @ w
