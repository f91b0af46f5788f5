"""Graph Fourier transform and spectral / polynomial signal filtering.

The polynomial route (powers of the Laplacian applied in the node domain) is
the production path; the frequency-domain route requires a full
eigendecomposition and exists for oracles and diagnostics.  For polynomial
frequency responses the two are exactly equal, not an approximation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import SizeMismatchError
from .graph import Laplacian


@dataclass(frozen=True)
class FilterSpec:
    """Polynomial filter bank.

    coeffs has shape (K, d): row k holds the weights of the L^k term, one
    per input channel.  K is the number of polynomial terms, so the powers
    used are 0 .. K-1.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if c.shape[0] < 1 or c.shape[1] < 1:
            raise ValueError(f"coeffs must be a (K>=1, d>=1) matrix, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("filter coefficients must be finite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        """Number of polynomial terms K (powers run 0..K-1)."""
        return self.coeffs.shape[0]

    @property
    def channels(self) -> int:
        return self.coeffs.shape[1]


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition L = U diag(eigenvalues) U^T with orthonormal U."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


def eigendecompose(lap: Laplacian) -> Spectrum:
    """Full symmetric eigendecomposition; tiny negative eigenvalues are
    clamped to zero so the spectrum is nonnegative."""
    values, vectors = np.linalg.eigh(lap.matrix)
    return Spectrum(np.maximum(values, 0.0), vectors)


def graph_fourier(spec: Spectrum, x: np.ndarray) -> np.ndarray:
    """Forward transform U^T x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise SizeMismatchError(f"signal shape {x.shape} does not match {spec.n} nodes")
    return spec.eigenvectors.T @ x


def inverse_graph_fourier(spec: Spectrum, coeffs: np.ndarray) -> np.ndarray:
    """Inverse transform U x_hat."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (spec.n,):
        raise SizeMismatchError(
            f"coefficient shape {coeffs.shape} does not match {spec.n} nodes"
        )
    return spec.eigenvectors @ coeffs


def polynomial_response(theta: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Evaluate sum_k theta_k lam^k elementwise over the spectrum."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or theta.size < 1:
        raise ValueError("theta must be a nonempty 1-D coefficient vector")
    return npoly.polyval(np.asarray(lam, dtype=float), theta)


def spectral_filter(spec: Spectrum, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Exact frequency-domain filtering U diag(F(lambda_1..n)) U^T x,
    with F(lambda) = sum_k theta_k lambda^k."""
    xh = graph_fourier(spec, x)
    return spec.eigenvectors @ (polynomial_response(theta, spec.eigenvalues) * xh)


def polynomial_filter(powers: list[np.ndarray], f: FilterSpec, x: np.ndarray) -> np.ndarray:
    """Node-domain filtering z = sum_k L^k X w^(k) with w^(k) = coeffs[k].

    Produces one output channel; no eigendecomposition involved.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != f.channels:
        raise SizeMismatchError(
            f"features must be (n, {f.channels}) to match the filter, got {x.shape}"
        )
    if len(powers) < f.order:
        raise SizeMismatchError(
            f"need Laplacian powers up to {f.order - 1}, got only {len(powers)}"
        )
    if powers[0].shape[0] != x.shape[0]:
        raise SizeMismatchError(
            f"{powers[0].shape[0]} Laplacian rows vs {x.shape[0]} feature rows"
        )
    z = np.zeros(x.shape[0])
    for k in range(f.order):
        z += powers[k] @ (x @ f.coeffs[k])
    return z
