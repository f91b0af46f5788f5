"""Graph correlation analysis: polynomial spectral filtering of graph
signals, a Gaussian 2-Wasserstein metric over the filtered signal
distributions, and a closed-form correlation solver for cross-modal graph
retrieval."""

from .errors import InvalidGraphError, SizeMismatchError, SolverError
from .estimator import GraphWassersteinCCA
from .filters import (
    FilterSpec,
    Spectrum,
    eigendecompose,
    graph_fourier,
    inverse_graph_fourier,
    polynomial_filter,
    polynomial_response,
    spectral_filter,
)
from .graph import Graph, Laplacian, build_laplacian, laplacian_powers, pad_graph, pad_pair
from .retrieval import (
    DISTANCE_MODES,
    RecallReport,
    RetrievalResult,
    evaluate,
    pairwise_distance,
    rank,
    recall_at_k,
)
from .solver import (
    CorrelationMatrices,
    CorrelationModel,
    accumulate,
    auto_reg,
    fused_features,
    pair_moments,
    project,
    solve,
)
from .synth import (
    EmbeddingGraphConfig,
    SynthConfig,
    build_embedding_graph,
    generate_pairs,
    random_graph,
)
from .wasserstein import (
    PairKernels,
    SignalStats,
    build_pair_kernels,
    cauchy_cross_bound,
    signal_stats,
    w2_gaussian,
    w2_metric,
    w2_multichannel,
    w2_upper_bound,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationMatrices",
    "CorrelationModel",
    "DISTANCE_MODES",
    "EmbeddingGraphConfig",
    "FilterSpec",
    "Graph",
    "GraphWassersteinCCA",
    "InvalidGraphError",
    "Laplacian",
    "PairKernels",
    "RecallReport",
    "RetrievalResult",
    "SignalStats",
    "SizeMismatchError",
    "SolverError",
    "Spectrum",
    "SynthConfig",
    "accumulate",
    "auto_reg",
    "build_embedding_graph",
    "build_laplacian",
    "build_pair_kernels",
    "cauchy_cross_bound",
    "eigendecompose",
    "evaluate",
    "fused_features",
    "generate_pairs",
    "graph_fourier",
    "inverse_graph_fourier",
    "laplacian_powers",
    "pad_graph",
    "pad_pair",
    "pair_moments",
    "pairwise_distance",
    "polynomial_filter",
    "polynomial_response",
    "project",
    "random_graph",
    "rank",
    "recall_at_k",
    "signal_stats",
    "solve",
    "spectral_filter",
    "w2_gaussian",
    "w2_metric",
    "w2_multichannel",
    "w2_upper_bound",
]
