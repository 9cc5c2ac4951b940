"""Prediction CLI: `predict link|node` over exported embedding timelines.

`link` trains a sequence model on the delta sequences of the timelines in
--emb (several files are concatenated column-wise) against snapshot ground
truth and reports AP or MRR on the chronological test split. `node` trains
the softmax classifier on the latest checkpoint against a labels file
(`node_id label` per line) and reports accuracy on held-out labels.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import SequenceModelConfig, load_config
from .data import chronological_split, load_snapshot_edges
from .loader import concat_timelines, load_timeline
from .train import evaluate_ap, evaluate_mrr, train_link_predictor, train_node_classifier


def _load_embeddings(emb: str):
    path = Path(emb)
    files = sorted(path.glob("*.dynp")) if path.is_dir() else [path]
    if not files:
        raise FileNotFoundError(f"no .dynp files under {emb}")
    return concat_timelines([load_timeline(p) for p in files])


def _cmd_link(args) -> int:
    config = load_config(args.config) if args.config else SequenceModelConfig()
    timeline = _load_embeddings(args.emb)
    edge_sets = load_snapshot_edges(args.snapshots)
    if len(edge_sets) != len(timeline):
        raise ValueError(
            f"{len(edge_sets)} snapshots but {len(timeline)} checkpoints; "
            "embed the same snapshot sequence first"
        )
    train_ks, val_ks, test_ks = chronological_split(len(timeline))
    model = train_link_predictor(timeline.deltas(), edge_sets, train_ks, config,
                                 verbose=args.verbose)
    for name, ks in (("val", val_ks), ("test", test_ks)):
        if args.metric == "ap":
            value = evaluate_ap(model, edge_sets, ks, seed=config.seed)
        else:
            value = evaluate_mrr(model, edge_sets, ks,
                                 n_negatives=config.negatives_eval, seed=config.seed)
        print(f"{name} {args.metric}: {value:.4f}")
    return 0


def _cmd_node(args) -> int:
    config = load_config(args.config) if args.config else SequenceModelConfig()
    timeline = _load_embeddings(args.emb)
    labels = {}
    for line in Path(args.labels).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        node, label = line.split()
        labels[int(node)] = int(label)
    nodes = sorted(labels)
    rng = np.random.default_rng(config.seed)
    held_out = set(rng.choice(nodes, size=max(1, len(nodes) // 5), replace=False).tolist())
    train_labels = {i: labels[i] for i in nodes if i not in held_out}
    latest = timeline.matrices[-1]
    clf = train_node_classifier(latest, train_labels, config)
    eval_nodes = np.asarray(sorted(held_out))
    predicted = clf.predict(latest[eval_nodes])
    truth = np.asarray([labels[i] for i in eval_nodes])
    print(f"held-out accuracy: {(predicted == truth).mean():.4f} on {len(eval_nodes)} nodes")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="predict", description=__doc__)
    sub = parser.add_subparsers(dest="task", required=True)

    p = sub.add_parser("link", help="future link prediction")
    p.add_argument("--emb", required=True, help=".dynp file or directory of them")
    p.add_argument("--snapshots", required=True, help="snapshot directory (ground truth)")
    p.add_argument("--config", help="TOML config with a [model] table")
    p.add_argument("--metric", choices=["ap", "mrr"], default="mrr")
    p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("node", help="dynamic node classification")
    p.add_argument("--emb", required=True)
    p.add_argument("--labels", required=True, help="labels file: node_id label per line")
    p.add_argument("--config", help="TOML config with a [model] table")

    args = parser.parse_args(argv)
    try:
        if args.task == "link":
            return _cmd_link(args)
        return _cmd_node(args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"predict: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
