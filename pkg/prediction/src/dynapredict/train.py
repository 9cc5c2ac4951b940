"""Training and evaluation for future link prediction and node classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Set

import numpy as np
import torch
from torch import nn

from .config import SequenceModelConfig
from .data import Edge, LinkExample, sample_negative, training_examples
from .metrics import ap_metric, mrr_metric, rank_of_positive
from .models import LinkPredictionModel, mlp_classifier


@dataclass
class LinkPredictor:
    """Trained sequence model plus the cached per-node prefix states."""

    module: LinkPredictionModel
    states: torch.Tensor  # (nodes, T+1, hidden)
    n_checkpoints: int

    def refresh(self, deltas: np.ndarray) -> None:
        """Recompute cached states from a (T, n, d) delta stack."""
        seq = torch.as_tensor(np.asarray(deltas), dtype=torch.float32).transpose(0, 1)
        self.module.eval()
        with torch.no_grad():
            self.states = self.module.prefix_states(seq)
        self.n_checkpoints = deltas.shape[0] + 1

    def predict(self, i: int, j: int, t: int) -> float:
        """Probability of edge (i, j) at checkpoint index t (history before t)."""
        if not 1 <= t <= self.n_checkpoints:
            raise ValueError(f"checkpoint index {t} outside 1..{self.n_checkpoints}")
        if max(i, j) >= self.states.shape[0] or min(i, j) < 0:
            raise KeyError(f"unknown node in pair ({i}, {j})")
        self.module.eval()
        with torch.no_grad():
            logit = self.module.pair_logits(
                self.states,
                torch.tensor([i]), torch.tensor([j]), torch.tensor([t]),
            )
        return float(torch.sigmoid(logit)[0])

    def batch_scores(self, i_idx, j_idx, k_idx) -> np.ndarray:
        self.module.eval()
        with torch.no_grad():
            logits = self.module.pair_logits(
                self.states,
                torch.as_tensor(i_idx), torch.as_tensor(j_idx), torch.as_tensor(k_idx),
            )
        return torch.sigmoid(logits).numpy()


def predict_link(model: LinkPredictor, i: int, j: int, t: int) -> float:
    return model.predict(i, j, t)


def train_link_predictor(
    deltas: np.ndarray,
    edge_sets: Sequence[Set[Edge]],
    train_ks: Sequence[int],
    config: SequenceModelConfig,
    verbose: bool = False,
) -> LinkPredictor:
    """Fit the sequence model on delta histories with per-epoch negative resampling.

    ``deltas`` is the (T, n, d) stack of checkpoint differences; checkpoint k
    is predicted from states after deltas 1..k-1. Positives are the edges of
    each training checkpoint, one fresh uniform non-edge per positive and
    epoch.
    """
    deltas = np.asarray(deltas, np.float64)
    if deltas.ndim != 3:
        raise ValueError(f"expected (T, n, d) deltas, got shape {deltas.shape}")
    if not train_ks:
        raise ValueError("empty training split")
    n_nodes = deltas.shape[1]
    torch.manual_seed(config.seed)
    module = LinkPredictionModel(deltas.shape[2], config)
    optimizer = torch.optim.Adam(module.parameters(), lr=config.learning_rate)
    loss_fn = nn.BCEWithLogitsLoss()
    seq = torch.as_tensor(deltas, dtype=torch.float32).transpose(0, 1)  # (n, T, d)
    rng = np.random.default_rng(config.seed)

    positives = [(k, u, v) for k in train_ks for (u, v) in sorted(edge_sets[k])]
    if not positives:
        raise ValueError("training split contains no edges")

    module.train()
    for epoch in range(config.epochs):
        examples: List[LinkExample] = []
        for k, u, v in positives:
            examples.append(LinkExample(u, v, k, 1))
            i, j = sample_negative(rng, n_nodes, u, edge_sets[k])
            examples.append(LinkExample(i, j, k, 0))
        order = rng.permutation(len(examples))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [examples[q] for q in order[start:start + config.batch_size]]
            states = module.prefix_states(seq)
            logits = module.pair_logits(
                states,
                torch.tensor([e.i for e in batch]),
                torch.tensor([e.j for e in batch]),
                torch.tensor([e.t for e in batch]),
            )
            labels = torch.tensor([float(e.label) for e in batch])
            loss = loss_fn(logits, labels)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(batch)
        if verbose and (epoch + 1) % 10 == 0:
            print(f"epoch {epoch + 1}: loss {total / len(examples):.4f}")

    predictor = LinkPredictor(module, torch.zeros(0), 0)
    predictor.refresh(deltas)
    return predictor


def evaluate_ap(
    model: LinkPredictor,
    edge_sets: Sequence[Set[Edge]],
    ks: Sequence[int],
    seed: int = 0,
) -> float:
    """Average precision with one fixed sampled negative per positive."""
    rng = np.random.default_rng(seed)
    n_nodes = model.states.shape[0]
    examples = training_examples(edge_sets, ks, n_nodes, rng, negatives_per_positive=1)
    scores = model.batch_scores(
        [e.i for e in examples], [e.j for e in examples], [e.t for e in examples]
    )
    return ap_metric(scores, [e.label for e in examples])


def evaluate_mrr(
    model: LinkPredictor,
    edge_sets: Sequence[Set[Edge]],
    ks: Sequence[int],
    n_negatives: int = 1000,
    seed: int = 0,
) -> float:
    """Per-snapshot MRR against n sampled non-edges per positive, then averaged."""
    rng = np.random.default_rng(seed)
    n_nodes = model.states.shape[0]
    snapshot_ranks: List[List[int]] = []
    for k in ks:
        ranks: List[int] = []
        for (u, v) in sorted(edge_sets[k]):
            pos = model.predict(u, v, k)
            neg_j = []
            while len(neg_j) < n_negatives:
                _, j = sample_negative(rng, n_nodes, u, edge_sets[k])
                neg_j.append(j)
            neg_scores = model.batch_scores(
                np.full(n_negatives, u), np.asarray(neg_j), np.full(n_negatives, k)
            )
            ranks.append(rank_of_positive(pos, neg_scores))
        if ranks:
            snapshot_ranks.append(ranks)
    return mrr_metric(snapshot_ranks)


@dataclass
class NodeClassifier:
    module: nn.Module
    classes: np.ndarray

    def predict(self, rows: np.ndarray) -> np.ndarray:
        self.module.eval()
        with torch.no_grad():
            logits = self.module(torch.as_tensor(rows, dtype=torch.float32))
        return self.classes[logits.argmax(dim=-1).numpy()]

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        self.module.eval()
        with torch.no_grad():
            logits = self.module(torch.as_tensor(rows, dtype=torch.float32))
        return torch.softmax(logits, dim=-1).numpy()


def train_node_classifier(
    embeddings: np.ndarray,
    labels: Dict[int, int],
    config: SequenceModelConfig,
) -> NodeClassifier:
    """Softmax MLP over the most recent node representations.

    ``embeddings`` is the latest checkpoint matrix (n, d); ``labels`` maps a
    labeled subset of node ids to class ids.
    """
    if not labels:
        raise ValueError("no labeled nodes")
    nodes = np.asarray(sorted(labels))
    if nodes.max() >= embeddings.shape[0]:
        raise ValueError(f"label references node {nodes.max()} beyond the embedding rows")
    classes = np.unique([labels[i] for i in nodes])
    class_index = {c: k for k, c in enumerate(classes)}
    y = torch.tensor([class_index[labels[i]] for i in nodes])
    x = torch.as_tensor(embeddings[nodes], dtype=torch.float32)

    torch.manual_seed(config.seed)
    module = mlp_classifier(embeddings.shape[1], len(classes), config)
    optimizer = torch.optim.Adam(module.parameters(), lr=config.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    module.train()
    for _ in range(config.epochs):
        perm = torch.randperm(len(nodes))
        for start in range(0, len(nodes), config.batch_size):
            idx = perm[start:start + config.batch_size]
            loss = loss_fn(module(x[idx]), y[idx])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
    return NodeClassifier(module, classes)
