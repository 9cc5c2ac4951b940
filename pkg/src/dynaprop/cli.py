"""Command line surface.

Commands: propagate (graph + events or snapshots -> embedding files),
stream (event replay, CTDG), verify (checkpoint-by-checkpoint comparison
against the dense reference), export (format/precision conversion), diff
(net change between two snapshot files).

Exit codes: 0 ok, 1 usage, 2 data error, 3 work budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .engine import FeatureStore, StreamSession, concat_filters
from .graph import WeightedDynamicGraph, diff_snapshots
from .oracle import dense_propagation, verify_error_bound
from .streams import (
    RunConfig,
    StreamFormatError,
    load_features,
    parse_event_stream,
    parse_snapshot_file,
    parse_snapshots,
    singleton_batches,
)
from .timeline_io import export_timeline, load_timeline

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BUDGET = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.2, help="restart mass in (0,1)")
    p.add_argument("--beta", type=float, default=0.5, help="degree normalization split in [0,1]")
    p.add_argument("--rmax", type=float, default=1e-7, help="push threshold")
    p.add_argument("--filter", choices=["ppr", "highpass", "both"], default="ppr")
    p.add_argument("--lazy", action="store_true", help="defer pushing to checkpoints")
    p.add_argument("--eager", action="store_true", help="process events one at a time")
    p.add_argument("--stride", type=int, default=1, help="checkpoint every k-th batch")
    p.add_argument("--budget", type=int, default=10**9, help="push budget per column")
    p.add_argument("--workers", type=int, default=None,
                   help="column workers (default: DYNAPROP_WORKERS or 1)")
    p.add_argument("--seed", type=int, default=0, help="random feature seed")
    p.add_argument("--feature-dim", type=int, default=128,
                   help="random feature width when no feature file is given")


def _add_input_options(p: argparse.ArgumentParser, events_required: bool = False) -> None:
    p.add_argument("--graph", help="initial snapshot edge list (u v w per line)")
    p.add_argument("--features", help="feature matrix file (.npy or text)")
    if events_required:
        p.add_argument("--events", required=True, help="event stream file (t op u v w)")
    else:
        p.add_argument("--events", help="event stream file (t op u v w)")
        p.add_argument("--snapshots", help="directory of snapshot files, name order = time order")


def _build_parser() -> _Parser:
    parser = _Parser(prog="dynaprop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", parents=[], help="compute embedding timelines")
    _add_input_options(p)
    _add_run_options(p)
    p.add_argument("--out", required=True, help="output directory for <tag>.dynp files")
    p.add_argument("--format", choices=["dynp", "tsv"], default="dynp")
    p.add_argument("--dtype", choices=["f64", "f32"], default="f64")
    p.add_argument("--concat", action="store_true",
                   help="also write the concatenation of all filter lanes")

    p = sub.add_parser("stream", help="replay a CTDG event stream")
    _add_input_options(p, events_required=True)
    _add_run_options(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["dynp", "tsv"], default="dynp")
    p.add_argument("--dtype", choices=["f64", "f32"], default="f64")
    p.add_argument("--concat", action="store_true")

    p = sub.add_parser("verify", help="check checkpoints against the dense reference")
    _add_input_options(p)
    _add_run_options(p)
    p.add_argument("--against-oracle", action="store_true", default=True)
    p.add_argument("--tail-tol", type=float, default=None)

    p = sub.add_parser("export", help="convert a timeline between formats")
    p.add_argument("--in", dest="src", required=True)
    p.add_argument("--out", dest="dst", required=True)
    p.add_argument("--dtype", choices=["f64", "f32"], default="f64")

    p = sub.add_parser("diff", help="net change between two snapshot files")
    p.add_argument("--prev", required=True)
    p.add_argument("--next", dest="next_file", required=True)
    return parser


def _config_from_args(args) -> RunConfig:
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("DYNAPROP_WORKERS", "1"))
    return RunConfig(
        alpha=args.alpha, beta=args.beta, r_max=args.rmax, filter=args.filter,
        lazy=args.lazy, eager=args.eager, checkpoint_stride=args.stride,
        work_budget=args.budget, workers=workers, seed=args.seed,
        feature_dim=args.feature_dim,
    )


def _load_inputs(args, config: RunConfig):
    graph = WeightedDynamicGraph()
    if args.graph:
        edges = parse_snapshot_file(args.graph)
        graph = WeightedDynamicGraph.from_edges(edges)
    batches = None
    snapshots = None
    if getattr(args, "events", None):
        batches = parse_event_stream(args.events)
        if config.eager:
            batches = singleton_batches(batches)
    if getattr(args, "snapshots", None):
        if batches is not None:
            raise ValueError("pass either --events or --snapshots, not both")
        snapshots = parse_snapshots(args.snapshots)
        if not args.graph:
            graph = WeightedDynamicGraph.from_edges(snapshots[0])
            snapshots = snapshots[1:]
    if args.features:
        matrix = load_features(args.features)
        features = FeatureStore(matrix=matrix, seed=config.seed)
    else:
        features = FeatureStore(dim=config.feature_dim, seed=config.seed)
    return graph, features, batches, snapshots


def _run_session(graph, features, batches, snapshots, config: RunConfig) -> StreamSession:
    session = StreamSession(
        graph, features, config.schedules(),
        lazy=config.lazy, work_budget=config.work_budget,
        checkpoint_stride=config.checkpoint_stride, workers=config.workers,
    )
    session.initialize(0)
    if batches is not None:
        for t, events in batches:
            session.apply_event_batch(t, events)
    if snapshots is not None:
        for k, edges in enumerate(snapshots):
            session.apply_snapshot(k + 1, edges)
    return session


def _cmd_propagate(args) -> int:
    config = _config_from_args(args)
    graph, features, batches, snapshots = _load_inputs(args, config)
    session = _run_session(graph, features, batches, snapshots, config)
    timelines = session.finish()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    suffix = ".tsv" if args.format == "tsv" else ".dynp"
    if args.concat and len(timelines) > 1:
        timelines = timelines + [concat_filters(timelines)]
    for tl in timelines:
        dest = out / f"{tl.tag.replace('+', '_')}{suffix}"
        export_timeline(tl, dest, dtype=args.dtype)
        print(f"{tl.tag}: {len(tl)} checkpoints, {tl.n_nodes} nodes x {tl.width} -> {dest}")
    code = EXIT_OK
    for tag, report in session.reports.items():
        status = "converged" if report.converged else "budget exhausted"
        print(f"{tag}: {report.pushes} pushes, {status}")
        if not report.converged:
            code = EXIT_BUDGET
    return code


def _cmd_verify(args) -> int:
    config = _config_from_args(args)
    graph, features, batches, snapshots = _load_inputs(args, config)
    session = StreamSession(
        graph, features, config.schedules(),
        lazy=config.lazy, work_budget=config.work_budget,
        checkpoint_stride=config.checkpoint_stride, workers=config.workers,
    )
    session.initialize(0)
    worst = 0.0
    failed = False

    def check(t):
        nonlocal worst, failed
        x = features.matrix(graph.n)
        deg = np.asarray(graph.degree)
        for lane in session.lanes:
            exact = dense_propagation(graph, lane.schedule, x, tail_tol=args.tail_tol)
            report = verify_error_bound(lane.state.estimate, exact, deg, lane.schedule)
            worst = max(worst, report.max_ratio)
            flag = "ok" if report.passed else "FAIL"
            print(f"t={t} {lane.schedule.tag}: max|err|/bound = {report.max_ratio:.4f} [{flag}]")
            if not report.passed:
                failed = True

    check(0)
    if batches is not None:
        for t, events in batches:
            session.apply_event_batch(t, events)
            session.checkpoint(t)
            check(t)
    if snapshots is not None:
        for k, edges in enumerate(snapshots):
            session.apply_snapshot(k + 1, edges)
            session.checkpoint(k + 1)
            check(k + 1)
    print(f"worst ratio: {worst:.6f}")
    return EXIT_DATA if failed else EXIT_OK


def _cmd_export(args) -> int:
    timeline = load_timeline(args.src)
    export_timeline(timeline, args.dst, dtype=args.dtype)
    print(f"{args.src} -> {args.dst} ({len(timeline)} checkpoints)")
    return EXIT_OK


def _cmd_diff(args) -> int:
    prev = WeightedDynamicGraph.from_edges(parse_snapshot_file(args.prev))
    nxt = parse_snapshot_file(args.next_file)
    diff = diff_snapshots(prev, nxt)
    for u in sorted(diff.affected):
        added = ",".join(f"{v}:{w:g}" for v, w in sorted(diff.added(u).items()))
        removed = ",".join(f"{v}:{w:g}" for v, w in sorted(diff.removed(u).items()))
        print(f"{u}\tdelta={diff.degree_delta(u):g}\tadded={added or '-'}\tremoved={removed or '-'}")
    print(f"# affected nodes: {len(diff.affected)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("propagate", "stream"):
            return _cmd_propagate(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "export":
            return _cmd_export(args)
        if args.command == "diff":
            return _cmd_diff(args)
        parser.error(f"unknown command {args.command!r}")
    except (StreamFormatError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"dynaprop: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
