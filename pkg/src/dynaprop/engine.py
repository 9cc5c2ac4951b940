"""Timeline orchestration: stream replay, checkpointed embeddings, deltas.

A :class:`StreamSession` owns the mutable graph plus one estimate/residual
state per filter schedule ("lane"). Event batches or snapshot diffs mutate
the graph once; every lane is then maintained with the same diff. Checkpoints
snapshot the converged estimate matrices into an :class:`EmbeddingTimeline`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .graph import GraphEvent, WeightedDynamicGraph, diff_snapshots
from .incremental import apply_batch_update
from .push import (
    DEFAULT_WORK_BUDGET,
    ConvergenceReport,
    PropagationState,
    init_state,
    push_until_converged,
)
from .schedule import FilterSchedule


class FeatureStore:
    """Node feature rows, materialized on registration.

    Rows beyond the provided matrix are generated uniform(-0.5, 0.5) from a
    seed mixed with the node id, so a node's features do not depend on the
    order in which nodes appear.
    """

    def __init__(self, matrix: Optional[np.ndarray] = None, dim: Optional[int] = None,
                 seed: Optional[int] = None):
        if matrix is not None:
            matrix = np.asarray(matrix, np.float64)
            if matrix.ndim == 1:
                matrix = matrix[:, None]
            self._rows = matrix.copy()
            self.dim = matrix.shape[1]
        elif dim is not None:
            self._rows = np.zeros((0, dim))
            self.dim = dim
        else:
            raise ValueError("provide a feature matrix or a dimension")
        self.seed = seed
        self._provided = self._rows.shape[0]

    @classmethod
    def random(cls, n: int, dim: int, seed: int) -> "FeatureStore":
        store = cls(dim=dim, seed=seed)
        store.ensure(n - 1)
        return store

    @property
    def n(self) -> int:
        return self._rows.shape[0]

    def _generate_row(self, node: int) -> np.ndarray:
        if self.seed is None:
            raise ValueError(
                f"node {node} has no provided feature row and no seed was configured"
            )
        rng = np.random.default_rng((self.seed, node))
        return rng.uniform(-0.5, 0.5, self.dim)

    def ensure(self, node: int) -> None:
        """Materialize rows up to and including ``node``."""
        if node < self.n:
            return
        new = np.vstack([self._generate_row(i) for i in range(self.n, node + 1)])
        self._rows = np.vstack([self._rows, new]) if self.n else new

    def row(self, node: int) -> np.ndarray:
        self.ensure(node)
        return self._rows[node]

    def matrix(self, n: Optional[int] = None) -> np.ndarray:
        if n is None:
            n = self.n
        if n > 0:
            self.ensure(n - 1)
        return self._rows[:n]


@dataclass
class EmbeddingTimeline:
    """Checkpointed embedding matrices Z_t, one per policy point.

    Matrices may grow in rows as nodes register; ``aligned()`` zero-pads
    early checkpoints to the final node count.
    """

    times: List[int]
    matrices: List[np.ndarray]
    schedule: Optional[FilterSchedule]
    tag: str
    feature_seed: Optional[int] = None

    def __post_init__(self):
        if len(self.times) != len(self.matrices):
            raise ValueError("one matrix per checkpoint time")
        if any(t1 >= t2 for t1, t2 in zip(self.times, self.times[1:])):
            raise ValueError("checkpoint times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def n_nodes(self) -> int:
        return self.matrices[-1].shape[0] if self.matrices else 0

    @property
    def width(self) -> int:
        return self.matrices[-1].shape[1] if self.matrices else 0

    def aligned(self) -> np.ndarray:
        """(T, n, d) array with zero rows for nodes born after a checkpoint."""
        n, d = self.n_nodes, self.width
        out = np.zeros((len(self), n, d))
        for k, z in enumerate(self.matrices):
            out[k, : z.shape[0]] = z
        return out


@dataclass
class DeltaSequence:
    """First-order differences of consecutive checkpoints, per node."""

    times: List[int]
    deltas: np.ndarray  # (T-1, n, d)

    def for_node(self, node: int) -> np.ndarray:
        return self.deltas[:, node, :]

    def __len__(self) -> int:
        return self.deltas.shape[0]


def delta_sequence(timeline: EmbeddingTimeline) -> DeltaSequence:
    """Elementwise checkpoint differences; rows absent at t-1 count as zero."""
    if len(timeline) < 2:
        raise ValueError("need at least two checkpoints to take differences")
    z = timeline.aligned()
    return DeltaSequence(times=list(timeline.times[1:]), deltas=np.diff(z, axis=0))


def concat_filters(timelines: Sequence[EmbeddingTimeline]) -> EmbeddingTimeline:
    """Column-wise concatenation of timelines sharing times and node sets."""
    if not timelines:
        raise ValueError("nothing to concatenate")
    first = timelines[0]
    if len(timelines) == 1:
        return first
    for other in timelines[1:]:
        if other.times != first.times:
            raise ValueError("checkpoint times differ between timelines")
        if other.n_nodes != first.n_nodes:
            raise ValueError("node counts differ between timelines")
    stacks = [tl.aligned() for tl in timelines]
    joined = np.concatenate(stacks, axis=2)
    return EmbeddingTimeline(
        times=list(first.times),
        matrices=[joined[k] for k in range(len(first))],
        schedule=first.schedule,
        tag="+".join(tl.tag for tl in timelines),
        feature_seed=first.feature_seed,
    )


@dataclass
class _Lane:
    schedule: FilterSchedule
    state: PropagationState
    timeline_times: List[int] = field(default_factory=list)
    timeline_matrices: List[np.ndarray] = field(default_factory=list)
    report: Optional[ConvergenceReport] = None

    def record(self, t: int):
        self.timeline_times.append(t)
        self.timeline_matrices.append(self.state.estimate.copy())

    def absorb_report(self, rep: Optional[ConvergenceReport]):
        if rep is None:
            return
        self.report = rep if self.report is None else self.report.merge(rep)


class StreamSession:
    """Replay of a dynamic graph against one or more filter lanes.

    Single-writer: the graph mutates only between pushes, and every lane
    sees the same mutation diff. With ``lazy`` the O(1) maintenance runs per
    batch but frontier drains are deferred to checkpoints.
    """

    def __init__(
        self,
        graph: WeightedDynamicGraph,
        features: FeatureStore,
        schedules: Sequence[FilterSchedule],
        lazy: bool = False,
        work_budget: int = DEFAULT_WORK_BUDGET,
        checkpoint_stride: int = 1,
        workers: int = 1,
        order: str = "fifo",
    ):
        if not schedules:
            raise ValueError("need at least one schedule")
        if checkpoint_stride < 1:
            raise ValueError("checkpoint stride must be at least 1")
        self.graph = graph
        self.features = features
        self.lazy = lazy
        self.work_budget = work_budget
        self.checkpoint_stride = checkpoint_stride
        self.workers = workers
        self.order = order
        x0 = features.matrix(graph.n)
        self.lanes = [_Lane(sched, init_state(x0)) for sched in schedules]
        self._batches_seen = 0
        self._last_time: Optional[int] = None
        self._initialized = False

    def initialize(self, t0: int = 0) -> None:
        """Converge every lane on the initial graph and checkpoint it."""
        if self._initialized:
            raise RuntimeError("session already initialized")
        for lane in self.lanes:
            rep = push_until_converged(
                self.graph, lane.schedule, lane.state,
                work_budget=self.work_budget, order=self.order, workers=self.workers,
            )
            lane.absorb_report(rep)
            lane.record(t0)
        self._last_time = t0
        self._initialized = True

    def _check_time(self, t: int) -> None:
        # equal times are legal (eager per-event replay); regression is not
        if not self._initialized:
            raise RuntimeError("call initialize() before streaming")
        if self._last_time is not None and t < self._last_time:
            raise ValueError(f"time {t} regresses below {self._last_time}")

    def _grow_lanes(self) -> None:
        n = self.graph.n
        for lane in self.lanes:
            if lane.state.n_nodes < n:
                lane.state.grow(self.features.matrix(n)[lane.state.n_nodes:])

    def _maintain(self, diff) -> None:
        x = self.features.matrix(self.graph.n)
        for lane in self.lanes:
            rep = apply_batch_update(
                self.graph, lane.state, diff, x, lane.schedule,
                work_budget=self.work_budget, push=not self.lazy,
                order=self.order, workers=self.workers,
            )
            lane.absorb_report(rep)

    def apply_event_batch(self, t: int, events: Iterable[GraphEvent]) -> None:
        """Apply simultaneous events as one net diff, maintain, maybe checkpoint."""
        self._check_time(t)
        diff = self.graph.apply_events(events)
        self.features.matrix(self.graph.n)
        self._grow_lanes()
        self._maintain(diff)
        self._after_batch(t)

    def apply_snapshot(self, t: int, edges: Iterable[Tuple[int, int, float]]) -> None:
        """Move the graph to the given snapshot via its diff, then maintain."""
        self._check_time(t)
        diff = diff_snapshots(self.graph, edges)
        self.graph.apply_diff(diff)
        self.features.matrix(self.graph.n)
        self._grow_lanes()
        self._maintain(diff)
        self._after_batch(t)

    def _after_batch(self, t: int) -> None:
        self._batches_seen += 1
        self._last_time = t
        if self._batches_seen % self.checkpoint_stride == 0:
            self.checkpoint(t)

    def checkpoint(self, t: Optional[int] = None) -> None:
        """Flush each lane to convergence and record the embedding matrices."""
        if t is None:
            t = self._last_time
        for lane in self.lanes:
            rep = push_until_converged(
                self.graph, lane.schedule, lane.state,
                work_budget=self.work_budget, order=self.order, workers=self.workers,
            )
            lane.absorb_report(rep)
            if lane.timeline_times and lane.timeline_times[-1] == t:
                lane.timeline_matrices[-1] = lane.state.estimate.copy()
            else:
                lane.record(t)

    def finish(self) -> List[EmbeddingTimeline]:
        """Checkpoint the final state if the stride skipped it, then assemble."""
        if self._initialized and self._last_time is not None and self.lanes:
            recorded = self.lanes[0].timeline_times
            if not recorded or recorded[-1] != self._last_time:
                self.checkpoint(self._last_time)
        return [
            EmbeddingTimeline(
                times=list(lane.timeline_times),
                matrices=lane.timeline_matrices,
                schedule=lane.schedule,
                tag=lane.schedule.tag,
                feature_seed=self.features.seed,
            )
            for lane in self.lanes
        ]

    @property
    def reports(self) -> Dict[str, ConvergenceReport]:
        return {lane.schedule.tag: lane.report for lane in self.lanes}


def run_timeline(
    initial_graph: WeightedDynamicGraph,
    features: FeatureStore,
    schedule: FilterSchedule,
    event_batches: Optional[Sequence[Tuple[int, List[GraphEvent]]]] = None,
    snapshots: Optional[Sequence[Iterable[Tuple[int, int, float]]]] = None,
    t0: int = 0,
    lazy: bool = False,
    checkpoint_stride: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    workers: int = 1,
) -> Tuple[EmbeddingTimeline, ConvergenceReport]:
    """Convenience wrapper: one schedule, one stream, returns its timeline.

    Exactly one of ``event_batches`` (time-grouped events) or ``snapshots``
    (edge lists at consecutive times) may be given; neither means a single
    static propagation of the initial graph.
    """
    if event_batches is not None and snapshots is not None:
        raise ValueError("pass either event batches or snapshots, not both")
    session = StreamSession(
        initial_graph, features, [schedule],
        lazy=lazy, checkpoint_stride=checkpoint_stride,
        work_budget=work_budget, workers=workers,
    )
    session.initialize(t0)
    if event_batches is not None:
        for t, events in event_batches:
            session.apply_event_batch(t, events)
    elif snapshots is not None:
        for k, edges in enumerate(snapshots):
            session.apply_snapshot(t0 + k + 1, edges)
    timeline = session.finish()[0]
    return timeline, session.reports[schedule.tag]
