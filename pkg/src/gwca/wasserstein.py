"""Gaussian statistics of filtered signals, the squared 2-Wasserstein
distance, the kernel matrices expressing those statistics as quadratic forms
in filter weights, and the quadratic upper bound on the pair distance.

Conventions: population normalization (divide by n, no Bessel correction);
variances are clamped at zero before square roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeMismatchError

VARIANCE_TOL = 1e-12


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


@dataclass(frozen=True)
class SignalStats:
    """Population mean and variance of one scalar node signal."""

    mean: float
    variance: float
    count: int

    def __post_init__(self):
        var = float(self.variance)
        if var < -VARIANCE_TOL:
            raise ValueError(f"variance {var:.3e} is negative beyond tolerance")
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "variance", max(var, 0.0))


def signal_stats(x: np.ndarray) -> SignalStats:
    """Population mean and variance (divide by n, not n-1) of a 1-D signal."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise SizeMismatchError(f"expected a 1-D signal, got shape {x.shape}")
    if x.size == 0:
        raise ValueError("empty signal")
    mu = float(x.mean())
    return SignalStats(mu, float(np.mean((x - mu) ** 2)), x.size)


def w2_gaussian(s1: SignalStats, s2: SignalStats) -> float:
    """Squared 2-Wasserstein distance between two scalar Gaussians:
    (mu1 - mu2)^2 + (sqrt(v1) - sqrt(v2))^2.

    This is the squared form; ``w2_metric`` returns its square root, which
    is the actual metric.
    """
    dm = s1.mean - s2.mean
    ds = math.sqrt(s1.variance) - math.sqrt(s2.variance)
    return dm * dm + ds * ds


def w2_metric(s1: SignalStats, s2: SignalStats) -> float:
    """The 2-Wasserstein metric proper: sqrt of ``w2_gaussian``."""
    return math.sqrt(w2_gaussian(s1, s2))


def w2_multichannel(z1: np.ndarray, z2: np.ndarray, weights: np.ndarray | None = None) -> float:
    """Sum of per-channel squared distances between two projected signal
    matrices (columns are channels); optionally weighted per channel."""
    z1 = np.atleast_2d(np.asarray(z1, dtype=float))
    z2 = np.atleast_2d(np.asarray(z2, dtype=float))
    if z1.shape[1] != z2.shape[1]:
        raise SizeMismatchError(f"channel counts differ: {z1.shape[1]} vs {z2.shape[1]}")
    if weights is None:
        weights = np.ones(z1.shape[1])
    total = 0.0
    for j in range(z1.shape[1]):
        total += float(weights[j]) * w2_gaussian(signal_stats(z1[:, j]), signal_stats(z2[:, j]))
    return total


@dataclass(frozen=True)
class PairKernels:
    """The six kernel matrices of one graph pair at Laplacian power ``order``.

    With a = X1 w1 and b = X2 w2 the quadratic forms reproduce the filtered
    statistics exactly:

        a^T k_mu1 a    = mu1^2        a^T k_sigma1 a  = var1
        b^T k_mu2 b    = mu2^2        b^T k_sigma2 b  = var2
        a^T k_mu12 b   = mu1 * mu2
        a^T k_sigma12 b <= sqrt(var1 * var2)   (Cauchy step)

    k_mu1/k_mu2/k_sigma1/k_sigma2 are symmetric PSD.
    """

    k_mu1: np.ndarray
    k_mu2: np.ndarray
    k_mu12: np.ndarray
    k_sigma1: np.ndarray
    k_sigma2: np.ndarray
    k_sigma12: np.ndarray
    order: int


def build_pair_kernels(
    powers1: list[np.ndarray], powers2: list[np.ndarray], k: int
) -> PairKernels:
    """Evaluate the six kernels from the two graphs' Laplacian powers at k.

    Both graphs must already share a node count (pad_pair first): the cross
    kernels assume a node correspondence.  Writing H = I - (1/n) 1 1^T for
    the centering projector, the variance kernels are
    (1/n) (H L^k)^T (H L^k) and the cross one (1/sqrt(n1 n2)) (H L1^k)^T (H L2^k).
    """
    if k < 0 or k >= len(powers1) or k >= len(powers2):
        raise ValueError(f"power {k} not available in the supplied lists")
    lk1 = powers1[k]
    lk2 = powers2[k]
    n1 = lk1.shape[0]
    n2 = lk2.shape[0]
    if n1 != n2:
        raise SizeMismatchError(
            f"graphs must be padded to equal node counts, got {n1} and {n2}"
        )
    # (1/n) 1^T L^k as a row vector; outer products give the mean kernels.
    s1 = lk1.sum(axis=0) / n1
    s2 = lk2.sum(axis=0) / n2
    centered1 = lk1 - lk1.mean(axis=0, keepdims=True)  # H L1^k
    centered2 = lk2 - lk2.mean(axis=0, keepdims=True)
    return PairKernels(
        k_mu1=np.outer(s1, s1),
        k_mu2=np.outer(s2, s2),
        k_mu12=np.outer(s1, s2),
        k_sigma1=_sym(centered1.T @ centered1 / n1),
        k_sigma2=_sym(centered2.T @ centered2 / n2),
        k_sigma12=centered1.T @ centered2 / math.sqrt(n1 * n2),
        order=k,
    )


def cauchy_cross_bound(x1c: np.ndarray, x2c: np.ndarray) -> tuple[float, float]:
    """Both sides of sqrt(var1 * var2) >= (1/sqrt(n1 n2)) x1c . x2c for
    centered signals; returns (lhs, rhs).  Equality iff the signals are
    positively proportional."""
    x1c = np.asarray(x1c, dtype=float)
    x2c = np.asarray(x2c, dtype=float)
    if x1c.shape != x2c.shape or x1c.ndim != 1:
        raise SizeMismatchError(
            f"centered signals must be 1-D of equal length, got {x1c.shape} and {x2c.shape}"
        )
    n = x1c.size
    if n == 0:
        raise ValueError("empty signal")
    var1 = float(x1c @ x1c) / n
    var2 = float(x2c @ x2c) / n
    lhs = math.sqrt(var1 * var2)
    rhs = float(x1c @ x2c) / n
    return lhs, rhs


def w2_upper_bound(
    kernels: PairKernels,
    x1: np.ndarray,
    x2: np.ndarray,
    w1: np.ndarray,
    w2: np.ndarray,
) -> float:
    """Quadratic-form upper bound on the squared pair distance:

        a^T (k_mu1 + k_sigma1) a + b^T (k_mu2 + k_sigma2) b
        - 2 a^T (k_mu12 + k_sigma12) b

    with a = X1 w1, b = X2 w2.  Dominates ``w2_gaussian`` of the filtered
    statistics; the gap comes only from the Cauchy step in the cross term.
    """
    a = np.asarray(x1, dtype=float) @ np.asarray(w1, dtype=float)
    b = np.asarray(x2, dtype=float) @ np.asarray(w2, dtype=float)
    if a.shape != (kernels.k_mu1.shape[0],) or b.shape != (kernels.k_mu2.shape[0],):
        raise SizeMismatchError("feature/weight shapes do not match the kernels")
    t1 = a @ (kernels.k_mu1 + kernels.k_sigma1) @ a
    t2 = b @ (kernels.k_mu2 + kernels.k_sigma2) @ b
    cross = a @ (kernels.k_mu12 + kernels.k_sigma12) @ b
    return float(t1 + t2 - 2.0 * cross)
