"""Downstream prediction over exported dynamic-graph embedding timelines."""

from .config import SequenceModelConfig, load_config
from .data import LinkExample, chronological_split, load_snapshot_edges, training_examples
from .loader import Timeline, concat_timelines, load_timeline
from .metrics import ap_metric, mrr_metric, random_ranking_mrr, rank_of_positive
from .train import (
    LinkPredictor,
    NodeClassifier,
    evaluate_ap,
    evaluate_mrr,
    predict_link,
    train_link_predictor,
    train_node_classifier,
)

__version__ = "0.1.0"

__all__ = [
    "LinkExample",
    "LinkPredictor",
    "NodeClassifier",
    "SequenceModelConfig",
    "Timeline",
    "ap_metric",
    "chronological_split",
    "concat_timelines",
    "evaluate_ap",
    "evaluate_mrr",
    "load_config",
    "load_snapshot_edges",
    "load_timeline",
    "mrr_metric",
    "predict_link",
    "random_ranking_mrr",
    "rank_of_positive",
    "train_link_predictor",
    "train_node_classifier",
    "training_examples",
]
