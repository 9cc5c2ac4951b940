"""sklearn-style facade over the streaming propagation engine.

The transformer maps (initial edges, node features) to graph-filtered node
embeddings and keeps absorbing timestamped event batches afterwards, so it
slots into pipelines that expect fit/transform plus get_params/set_params.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_edge_list, check_feature_matrix
from .engine import FeatureStore, StreamSession, concat_filters, delta_sequence
from .graph import GraphEvent, WeightedDynamicGraph
from .streams import RunConfig


class TemporalGraphEmbedding(BaseEstimator):
    """Graph-filter node embeddings maintained under streaming edge events.

    Parameters mirror the CLI: `alpha` is the restart mass, `beta` splits the
    degree normalization, `r_max` bounds per-node error, `filter` picks the
    low-pass lane, the sign-alternating lane, or both (concatenated on
    transform). With `lazy` the per-event maintenance stays O(1) and pushing
    happens at checkpoint time.
    """

    def __init__(
        self,
        alpha: float = 0.2,
        beta: float = 0.5,
        r_max: float = 1e-7,
        filter: str = "ppr",
        lazy: bool = False,
        checkpoint_stride: int = 1,
        work_budget: int = 10**9,
        workers: int = 1,
        seed: int = 0,
    ):
        self.alpha = alpha
        self.beta = beta
        self.r_max = r_max
        self.filter = filter
        self.lazy = lazy
        self.checkpoint_stride = checkpoint_stride
        self.work_budget = work_budget
        self.workers = workers
        self.seed = seed

    def _config(self) -> RunConfig:
        return RunConfig(
            alpha=self.alpha, beta=self.beta, r_max=self.r_max, filter=self.filter,
            lazy=self.lazy, checkpoint_stride=self.checkpoint_stride,
            work_budget=self.work_budget, workers=self.workers, seed=self.seed,
        )

    def fit(self, X, y=None, edges: Iterable = ()):
        """Propagate the initial graph; X is the node feature matrix."""
        config = self._config()
        X = check_feature_matrix(X)
        edge_list = check_edge_list(edges)
        graph = WeightedDynamicGraph(X.shape[0])
        for u, v, w in edge_list:
            graph.ensure_node(max(u, v))
            graph.add_edge(u, v, w)
        if graph.n > X.shape[0]:
            raise ValueError(
                f"edges reference node {graph.n - 1} but features cover {X.shape[0]} rows"
            )
        features = FeatureStore(matrix=X, seed=self.seed)
        self.session_ = StreamSession(
            graph, features, config.schedules(),
            lazy=config.lazy, work_budget=config.work_budget,
            checkpoint_stride=config.checkpoint_stride, workers=config.workers,
        )
        self.session_.initialize(0)
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "session_"):
            raise RuntimeError("estimator is not fitted; call fit first")

    def update(self, t: int, events: Sequence[GraphEvent]):
        """Absorb one batch of simultaneous events at time t."""
        self._check_fitted()
        self.session_.apply_event_batch(t, events)
        return self

    def update_snapshot(self, t: int, edges: Iterable[Tuple[int, int, float]]):
        """Move to a full snapshot at time t via its diff."""
        self._check_fitted()
        self.session_.apply_snapshot(t, check_edge_list(edges))
        return self

    def transform(self, X=None) -> np.ndarray:
        """Current embedding matrix; lanes are concatenated column-wise."""
        self._check_fitted()
        self.session_.checkpoint()
        mats = [lane.state.estimate for lane in self.session_.lanes]
        return np.hstack(mats) if len(mats) > 1 else mats[0].copy()

    def fit_transform(self, X, y=None, edges: Iterable = ()) -> np.ndarray:
        return self.fit(X, y=y, edges=edges).transform()

    def timelines(self):
        """Checkpointed timelines accumulated so far, one per filter lane."""
        self._check_fitted()
        return self.session_.finish()

    def concat_timeline(self):
        return concat_filters(self.timelines())

    def delta_sequences(self):
        return [delta_sequence(tl) for tl in self.timelines()]

    @property
    def n_nodes_(self) -> int:
        self._check_fitted()
        return self.session_.graph.n

    @property
    def reports_(self):
        self._check_fitted()
        return self.session_.reports
