"""Scikit-learn style estimator wrapping the accumulate/solve/project
pipeline, so the solver composes with the wider ecosystem (get_params,
clone, pipelines over precomputed graph lists)."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .graph import Graph
from .retrieval import pairwise_distance, rank
from .solver import accumulate, project, solve


class GraphWassersteinCCA(BaseEstimator):
    """Learn paired graph projections whose filtered signal distributions are
    maximally correlated, and compare graphs by the closed-form Gaussian
    transport distance between the projected signals.

    Parameters
    ----------
    order : int, default=2
        Number of polynomial filter terms; Laplacian powers 0..order-1.
    fusion : bool, default=True
        Concatenate the filtered features of every power so one solve spans
        all receptive-field orders; False uses the highest power alone.
    reg : float or None, default=None
        Ridge added to both view moment matrices; None resolves to
        1e-6 * trace/dim per view.
    n_components : int or None, default=None
        Projection channels kept; None keeps min(D1, D2, 240).
    weighted : bool, default=False
        Weight per-channel distances by rho^2.
    threads : int, default=1
        Worker threads for per-pair moment accumulation.

    Attributes
    ----------
    model_ : CorrelationModel
        Learned projections w1/w2 and correlations rho, set by fit.
    """

    def __init__(self, order=2, fusion=True, reg=None, n_components=None,
                 weighted=False, threads=1):
        self.order = order
        self.fusion = fusion
        self.reg = reg
        self.n_components = n_components
        self.weighted = weighted
        self.threads = threads

    def fit(self, pairs, y=None):
        """Accumulate kernel moments over (view-1, view-2) graph pairs and
        solve for the projections."""
        if int(self.order) < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        cm = accumulate(pairs, int(self.order) - 1, bool(self.fusion),
                        threads=int(self.threads))
        self.model_ = solve(cm, self.reg, self.n_components)
        return self

    def _fitted_model(self):
        model = getattr(self, "model_", None)
        if model is None:
            raise NotFittedError("fit the estimator before using it")
        return model

    def transform(self, graphs, view: int = 1):
        """Project graphs into the learned channel space.

        A single Graph gives one (n, channels) array; an iterable gives a
        list of them (node counts may differ per graph).
        """
        model = self._fitted_model()
        if isinstance(graphs, Graph):
            return project(model, graphs, view)
        return [project(model, g, view) for g in graphs]

    def pair_distance(self, query: Graph, item: Graph) -> float:
        """Distance between a view-1 query and a view-2 corpus item."""
        mode = "w2-weighted" if self.weighted else "w2"
        return pairwise_distance(self._fitted_model(), query, item, mode)

    def predict(self, queries, corpus):
        """Nearest corpus index for each query graph."""
        model = self._fitted_model()
        mode = "w2-weighted" if self.weighted else "w2"
        queries = [queries] if isinstance(queries, Graph) else list(queries)
        corpus = list(corpus)
        best = [rank(model, q, corpus, mode=mode).ranked[0][0] for q in queries]
        return np.asarray(best, dtype=int)

    @property
    def correlations_(self) -> np.ndarray:
        return self._fitted_model().rho
