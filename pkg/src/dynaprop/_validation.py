"""Input validation helpers shared by the estimator and engine entry points."""

from __future__ import annotations

from typing import Iterable, List, Tuple

import numpy as np


def check_feature_matrix(X, n_nodes: int | None = None) -> np.ndarray:
    """As float64 2-D array with finite entries; optionally pinned row count."""
    X = np.asarray(X, np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"features must be a vector or matrix, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("features contain non-finite values")
    if n_nodes is not None and X.shape[0] != n_nodes:
        raise ValueError(f"features cover {X.shape[0]} nodes, expected {n_nodes}")
    return X


def check_edge_list(edges: Iterable) -> List[Tuple[int, int, float]]:
    """Normalize (u, v[, w]) tuples; ids non-negative ints, weights positive."""
    out: List[Tuple[int, int, float]] = []
    for k, edge in enumerate(edges):
        edge = tuple(edge)
        if len(edge) == 2:
            u, v = edge
            w = 1.0
        elif len(edge) == 3:
            u, v, w = edge
        else:
            raise ValueError(f"edge {k} has {len(edge)} fields, expected (u, v[, w])")
        u, v, w = int(u), int(v), float(w)
        if u < 0 or v < 0:
            raise ValueError(f"edge {k} has negative node ids: ({u}, {v})")
        if u == v:
            raise ValueError(f"edge {k} is a self loop on node {u}")
        if w <= 0.0 or not np.isfinite(w):
            raise ValueError(f"edge {k} has non-positive or non-finite weight {w}")
        out.append((u, v, w))
    return out
