"""Ranking metrics for link prediction: average precision and MRR.

AP follows the standard ranked-retrieval definition: precision measured at
each positive's position in the descending-score order, averaged over
positives. MRR is computed per snapshot (mean reciprocal rank of each
positive among its own candidate set) and then averaged across snapshots.
Ranks are pessimistic under ties: a positive scoring equal to k negatives
ranks below them, so constant scorers cannot look better than random.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def ap_metric(scores, labels) -> float:
    """Average precision of a scored binary ranking."""
    scores = np.asarray(scores, np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be equal-length vectors")
    if scores.size == 0:
        raise ValueError("empty input")
    if not np.any(labels == 1):
        raise ValueError("no positive examples")
    order = np.argsort(-scores, kind="stable")
    ranked = labels[order]
    hits = np.cumsum(ranked)
    positions = np.arange(1, ranked.size + 1)
    precision_at_hit = hits[ranked == 1] / positions[ranked == 1]
    return float(precision_at_hit.mean())


def rank_of_positive(positive_score: float, negative_scores) -> int:
    """1-based rank of the positive among its negatives; ties count against it."""
    neg = np.asarray(negative_scores, np.float64)
    return int(1 + np.count_nonzero(neg >= positive_score))


def mrr_metric(snapshot_ranks: Sequence[Sequence[int]]) -> float:
    """Mean over snapshots of the mean reciprocal rank within each snapshot."""
    if len(snapshot_ranks) == 0:
        raise ValueError("empty input")
    per_snapshot = []
    for ranks in snapshot_ranks:
        ranks = np.asarray(ranks, np.float64)
        if ranks.size == 0:
            raise ValueError("a snapshot has no ranked positives")
        if np.any(ranks < 1):
            raise ValueError("ranks are 1-based")
        per_snapshot.append(float((1.0 / ranks).mean()))
    return float(np.mean(per_snapshot))


def random_ranking_mrr(n_candidates: int) -> float:
    """Expected MRR of a uniformly random scorer over n_candidates ranks."""
    return float(np.mean(1.0 / np.arange(1, n_candidates + 1)))
