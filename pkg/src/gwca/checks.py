"""Self-contained numerical property suite behind ``gwca check``.

Each check draws its own random instances from a seed, measures the worst
violation of one contract, and reports pass/fail against a documented
tolerance.  The acceptance tests drive the same functions, so the CLI and
the test suite cannot drift apart.

``fault`` is a test-only hook: "kernel-sign" flips the sign of one variance
kernel inside the kernel-identity check, proving the suite actually detects
a broken kernel.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .filters import FilterSpec, eigendecompose, polynomial_filter, spectral_filter
from .graph import build_laplacian, laplacian_powers, pad_pair
from .solver import accumulate, auto_reg, solve
from .synth import SynthConfig, generate_pairs, random_graph
from .wasserstein import (
    SignalStats,
    build_pair_kernels,
    cauchy_cross_bound,
    signal_stats,
    w2_gaussian,
    w2_upper_bound,
)

FAULT_MODES = ("kernel-sign",)


@dataclass
class CheckResult:
    name: str
    passed: bool
    trials: int
    worst: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""
    failing_case: dict | None = field(default=None, repr=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.name:<22} {status}  trials={self.trials:<6d} "
            f"worst={self.worst:.3e}  tol={self.tolerance:.0e}  {self.seconds:6.2f}s"
        )


def _timed(fn):
    def wrapper(*args, **kwargs) -> CheckResult:
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - start
        return result

    return wrapper


@_timed
def check_filter_equivalence(seed: int = 0, trials: int = 200, fault: str | None = None) -> CheckResult:
    """Frequency-domain and node-domain polynomial filtering agree to a
    relative error below 1e-8 on random graphs (n <= 50, up to 5 terms)."""
    rng = np.random.default_rng(seed)
    tol = 1e-8
    worst = 0.0
    failing = None
    for t in range(trials):
        n = int(rng.integers(2, 51))
        d = int(rng.integers(1, 5))
        k_terms = int(rng.integers(1, 6))
        g = random_graph(rng, n, density=rng.uniform(0.1, 0.9), d=d)
        coeffs = rng.standard_normal((k_terms, d))
        lap = build_laplacian(g)
        powers = laplacian_powers(lap, k_terms - 1)
        z_poly = polynomial_filter(powers, FilterSpec(coeffs), g.features)
        spec = eigendecompose(lap)
        z_spec = np.zeros(n)
        for j in range(d):
            z_spec += spectral_filter(spec, coeffs[:, j], g.features[:, j])
        err = float(np.linalg.norm(z_poly - z_spec) / max(np.linalg.norm(z_spec), 1e-30))
        if err > worst:
            worst = err
            if err > tol:
                failing = {"trial": t, "n": n, "terms": k_terms, "error": err}
    return CheckResult("filter-equivalence", worst < tol, trials, worst, tol, failing_case=failing)


def _identity_instance(rng: np.random.Generator):
    n = int(rng.integers(2, 25))
    d1 = int(rng.integers(1, 7))
    d2 = int(rng.integers(1, 7))
    k = int(rng.integers(0, 5))
    g1 = random_graph(rng, n, density=rng.uniform(0.1, 0.9), d=d1)
    g2 = random_graph(rng, n, density=rng.uniform(0.1, 0.9), d=d2)
    w1 = rng.standard_normal(d1)
    w2 = rng.standard_normal(d2)
    p1 = laplacian_powers(build_laplacian(g1), k)
    p2 = laplacian_powers(build_laplacian(g2), k)
    return g1, g2, w1, w2, p1, p2, k


@_timed
def check_kernel_identities(seed: int = 0, trials: int = 1000, fault: str | None = None) -> CheckResult:
    """The five kernel quadratic forms reproduce the directly computed
    statistics of the filtered signals (normalized error below 1e-10)."""
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst = 0.0
    failing = None
    for t in range(trials):
        g1, g2, w1, w2, p1, p2, k = _identity_instance(rng)
        kernels = build_pair_kernels(p1, p2, k)
        if fault == "kernel-sign":
            kernels = replace(kernels, k_sigma1=-kernels.k_sigma1)
        x1 = p1[k] @ g1.features @ w1
        x2 = p2[k] @ g2.features @ w2
        s1 = signal_stats(x1)
        s2 = signal_stats(x2)
        a = g1.features @ w1
        b = g2.features @ w2
        checks = [
            (a @ kernels.k_mu1 @ a, s1.mean**2),
            (b @ kernels.k_mu2 @ b, s2.mean**2),
            (a @ kernels.k_mu12 @ b, s1.mean * s2.mean),
            (a @ kernels.k_sigma1 @ a, s1.variance),
            (b @ kernels.k_sigma2 @ b, s2.variance),
        ]
        for got, want in checks:
            err = abs(got - want) / max(1.0, abs(want))
            if err > worst:
                worst = err
                if err > tol:
                    failing = {
                        "trial": t,
                        "n": g1.n,
                        "k": k,
                        "got": float(got),
                        "want": float(want),
                        "adjacency1": g1.adjacency.tolist(),
                        "features1": g1.features.tolist(),
                        "w1": w1.tolist(),
                    }
    return CheckResult("kernel-identities", worst < tol, trials, worst, tol, failing_case=failing)


@_timed
def check_cauchy_bound(seed: int = 0, trials: int = 1000, fault: str | None = None) -> CheckResult:
    """sqrt(var1*var2) dominates the normalized cross inner product of
    centered filtered signals (violations beyond 1e-12 never occur), with
    equality on positively proportional signals."""
    rng = np.random.default_rng(seed)
    tol = 1e-12
    worst = 0.0  # largest violation rhs - lhs, and equality-gap on aligned pairs
    failing = None
    for t in range(trials):
        n = int(rng.integers(2, 31))
        g = random_graph(rng, n, density=rng.uniform(0.1, 0.9), d=2)
        k = int(rng.integers(0, 4))
        lk = laplacian_powers(build_laplacian(g), k)[k]
        x1 = lk @ g.features[:, 0]
        x2 = lk @ g.features[:, 1]
        x1c = x1 - x1.mean()
        x2c = x2 - x2.mean()
        lhs, rhs = cauchy_cross_bound(x1c, x2c)
        violation = rhs - lhs
        # equality case: positively scaled copy must be tight
        scale = float(rng.uniform(0.1, 5.0))
        lhs_eq, rhs_eq = cauchy_cross_bound(x1c, scale * x1c)
        gap = abs(lhs_eq - rhs_eq) / max(1.0, lhs_eq)
        err = max(violation, gap)
        if err > worst:
            worst = err
            if err > tol:
                failing = {"trial": t, "n": n, "k": k, "violation": violation, "equality_gap": gap}
    return CheckResult("cauchy-bound", worst < tol, trials, worst, tol, failing_case=failing)


@_timed
def check_bound_dominance(seed: int = 0, trials: int = 500, fault: str | None = None) -> CheckResult:
    """The quadratic-form bound dominates the exact squared distance of the
    filtered pair statistics (margin never below -1e-9)."""
    rng = np.random.default_rng(seed)
    tol = 1e-9
    worst = 0.0  # largest exact - bound
    failing = None
    for t in range(trials):
        n1 = int(rng.integers(2, 25))
        n2 = int(rng.integers(2, 25))
        d1 = int(rng.integers(1, 6))
        d2 = int(rng.integers(1, 6))
        k = int(rng.integers(0, 4))
        g1, g2 = pad_pair(
            random_graph(rng, n1, density=rng.uniform(0.1, 0.9), d=d1),
            random_graph(rng, n2, density=rng.uniform(0.1, 0.9), d=d2),
        )
        w1 = rng.standard_normal(d1)
        w2 = rng.standard_normal(d2)
        p1 = laplacian_powers(build_laplacian(g1), k)
        p2 = laplacian_powers(build_laplacian(g2), k)
        kernels = build_pair_kernels(p1, p2, k)
        bound = w2_upper_bound(kernels, g1.features, g2.features, w1, w2)
        exact = w2_gaussian(
            signal_stats(p1[k] @ g1.features @ w1),
            signal_stats(p2[k] @ g2.features @ w2),
        )
        margin = exact - bound
        if margin > worst:
            worst = margin
            if margin > tol:
                failing = {"trial": t, "n": g1.n, "k": k, "bound": bound, "exact": exact}
    return CheckResult("bound-dominance", worst < tol, trials, worst, tol, failing_case=failing)


@_timed
def check_metric_axioms(seed: int = 0, trials: int = 10000, fault: str | None = None) -> CheckResult:
    """sqrt of the squared distance is a metric on (mean, sqrt variance)
    pairs: symmetry, identity, triangle inequality on random triples."""
    rng = np.random.default_rng(seed)
    tol = 1e-10
    mus = rng.uniform(-5, 5, size=(trials, 3))
    variances = rng.uniform(0, 4, size=(trials, 3))
    worst = 0.0
    failing = None
    for t in range(trials):
        a, b, c = (
            SignalStats(mus[t, i], variances[t, i], 1) for i in range(3)
        )
        dab = math.sqrt(w2_gaussian(a, b))
        dba = math.sqrt(w2_gaussian(b, a))
        dac = math.sqrt(w2_gaussian(a, c))
        dbc = math.sqrt(w2_gaussian(b, c))
        daa = math.sqrt(w2_gaussian(a, a))
        violation = max(abs(dab - dba), daa, dac - (dab + dbc))
        if violation > worst:
            worst = violation
            if violation > tol:
                failing = {"trial": t, "mu": mus[t].tolist(), "var": variances[t].tolist()}
    return CheckResult("metric-axioms", worst < tol, trials, worst, tol, failing_case=failing)


@_timed
def check_eigen_residuals(seed: int = 0, trials: int = 20, fault: str | None = None) -> CheckResult:
    """Solver output satisfies both product eigen-equations with relative
    residual below 1e-6 per channel."""
    rng = np.random.default_rng(seed)
    tol = 1e-6
    worst = 0.0
    failing = None
    for t in range(trials):
        cfg = SynthConfig(
            pairs=int(rng.integers(8, 25)),
            nodes=(5, 14),
            d1=int(rng.integers(2, 5)),
            d2=int(rng.integers(2, 5)),
            noise=float(rng.uniform(0.05, 0.8)),
            density=0.4,
            mixing="gaussian",
            seed=int(rng.integers(0, 2**31)),
        )
        pairs = generate_pairs(cfg)
        k = int(rng.integers(0, 4))
        fusion = bool(rng.integers(0, 2))
        cm = accumulate(pairs, k, fusion)
        model = solve(cm)
        eps1, eps2 = auto_reg(cm)
        c1r = cm.c1 + eps1 * np.eye(cm.c1.shape[0])
        c2r = cm.c2 + eps2 * np.eye(cm.c2.shape[0])
        for j in range(model.channels):
            w1 = model.w1[:, j]
            w2 = model.w2[:, j]
            rho2 = model.rho[j] ** 2
            lhs1 = np.linalg.solve(c1r, cm.c12 @ np.linalg.solve(c2r, cm.c21 @ w1))
            lhs2 = np.linalg.solve(c2r, cm.c21 @ np.linalg.solve(c1r, cm.c12 @ w2))
            res = max(
                float(np.linalg.norm(lhs1 - rho2 * w1) / np.linalg.norm(w1)),
                float(np.linalg.norm(lhs2 - rho2 * w2) / np.linalg.norm(w2)),
            )
            if res > worst:
                worst = res
                if res > tol:
                    failing = {"trial": t, "channel": j, "rho": float(model.rho[j]), "residual": res}
    return CheckResult("eigen-residuals", worst < tol, trials, worst, tol, failing_case=failing)


ALL_CHECKS = (
    ("filter-equivalence", check_filter_equivalence, 200),
    ("kernel-identities", check_kernel_identities, 1000),
    ("cauchy-bound", check_cauchy_bound, 1000),
    ("bound-dominance", check_bound_dominance, 500),
    ("metric-axioms", check_metric_axioms, 10000),
    ("eigen-residuals", check_eigen_residuals, 20),
)


def run_all(seed: int = 0, trials: int | None = None, fault: str | None = None) -> list[CheckResult]:
    """Run every registered check; ``trials`` overrides each check's default
    trial count when given."""
    if fault is not None and fault not in FAULT_MODES:
        raise ValueError(f"unknown fault mode {fault!r}, pick from {FAULT_MODES}")
    results = []
    for _name, fn, default_trials in ALL_CHECKS:
        results.append(fn(seed=seed, trials=trials or default_trials, fault=fault))
    return results
