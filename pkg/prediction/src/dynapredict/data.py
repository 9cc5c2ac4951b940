"""Link-prediction examples: snapshot ground truth, splits, negative sampling."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Set, Tuple, Union

import numpy as np

Edge = Tuple[int, int]


@dataclass(frozen=True)
class LinkExample:
    """One candidate edge at a checkpoint: label 1 = present, 0 = sampled non-edge."""

    i: int
    j: int
    t: int
    label: int


def load_snapshot_edges(directory: Union[str, Path]) -> List[Set[Edge]]:
    """Undirected edge sets from a snapshot directory (u v [w] lines, name order)."""
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.is_file())
    if not files:
        raise FileNotFoundError(f"no snapshot files in {directory}")
    out: List[Set[Edge]] = []
    for path in files:
        edges: Set[Edge] = set()
        for line in path.read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            u, v = int(parts[0]), int(parts[1])
            edges.add((min(u, v), max(u, v)))
        out.append(edges)
    return out


def chronological_split(n_checkpoints: int) -> Tuple[List[int], List[int], List[int]]:
    """70/15/15 split over predictable checkpoint indices 1..T-1.

    Index k means "predict the edges of checkpoint k from history before k",
    so index 0 (no history) is never an example.
    """
    ks = list(range(1, n_checkpoints))
    if len(ks) < 3:
        raise ValueError("need at least four checkpoints to split chronologically")
    n_train = max(1, int(round(len(ks) * 0.70)))
    n_val = max(1, int(round(len(ks) * 0.15)))
    n_train = min(n_train, len(ks) - 2)
    val_end = min(n_train + n_val, len(ks) - 1)
    return ks[:n_train], ks[n_train:val_end], ks[val_end:]


def sample_negative(rng, n_nodes: int, anchor: int, edges: Set[Edge]) -> Edge:
    """Uniform non-edge (anchor, j) at the given snapshot."""
    while True:
        j = int(rng.integers(0, n_nodes))
        if j == anchor:
            continue
        if (min(anchor, j), max(anchor, j)) not in edges:
            return anchor, j


def training_examples(
    edge_sets: Sequence[Set[Edge]],
    ks: Sequence[int],
    n_nodes: int,
    rng,
    negatives_per_positive: int = 1,
) -> List[LinkExample]:
    """Positives = edges at checkpoint k; negatives sampled from its non-edges."""
    out: List[LinkExample] = []
    for k in ks:
        for (u, v) in sorted(edge_sets[k]):
            out.append(LinkExample(u, v, k, 1))
            for _ in range(negatives_per_positive):
                i, j = sample_negative(rng, n_nodes, u, edge_sets[k])
                out.append(LinkExample(i, j, k, 0))
    return out
