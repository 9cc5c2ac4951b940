"""Streaming graph-filter embeddings for dynamic graphs.

Maintains approximate propagation results (estimate/residual pairs) under
edge insertions, deletions and snapshot diffs, with a per-node error bound,
and checkpoints embedding timelines for downstream sequence models.
"""

from .engine import (
    DeltaSequence,
    EmbeddingTimeline,
    FeatureStore,
    StreamSession,
    concat_filters,
    delta_sequence,
    run_timeline,
)
from .estimator import TemporalGraphEmbedding
from .graph import (
    ADD_EDGE,
    ADD_NODE,
    DELETE_EDGE,
    GraphEvent,
    SnapshotDiff,
    WeightedDynamicGraph,
    diff_snapshots,
)
from .incremental import (
    apply_batch_update,
    apply_single_event,
    rescale_estimate,
    residual_increment,
)
from .oracle import BoundReport, dense_propagation, verify_error_bound
from .push import (
    ConvergenceReport,
    PropagationState,
    PushPlan,
    init_state,
    push_node,
    push_until_converged,
    verify_invariant,
)
from .schedule import FilterSchedule, highpass_schedule, ppr_schedule
from .streams import (
    RunConfig,
    StreamFormatError,
    parse_event_stream,
    parse_snapshot_file,
    parse_snapshots,
    write_event_stream,
)
from .timeline_io import export_timeline, load_timeline

__version__ = "0.1.0"

__all__ = [
    "ADD_EDGE",
    "ADD_NODE",
    "DELETE_EDGE",
    "BoundReport",
    "ConvergenceReport",
    "DeltaSequence",
    "EmbeddingTimeline",
    "FeatureStore",
    "FilterSchedule",
    "GraphEvent",
    "PropagationState",
    "PushPlan",
    "RunConfig",
    "SnapshotDiff",
    "StreamFormatError",
    "StreamSession",
    "TemporalGraphEmbedding",
    "WeightedDynamicGraph",
    "apply_batch_update",
    "apply_single_event",
    "concat_filters",
    "delta_sequence",
    "dense_propagation",
    "diff_snapshots",
    "export_timeline",
    "highpass_schedule",
    "init_state",
    "load_timeline",
    "parse_event_stream",
    "parse_snapshot_file",
    "parse_snapshots",
    "ppr_schedule",
    "push_node",
    "push_until_converged",
    "rescale_estimate",
    "residual_increment",
    "run_timeline",
    "verify_error_bound",
    "verify_invariant",
    "write_event_stream",
]
