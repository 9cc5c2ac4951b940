"""Event-stream and snapshot file parsing, plus the validated run config.

Event stream: one record per line, tab-separated `t  op  u  v  w` with
op in {+, -}. Node additions are implied by first appearance. Records must
be sorted by timestamp; equal timestamps form one batch. Snapshot files are
edge lists `u v w` (weight optional, default 1); a snapshot directory is
read in lexicographic order, one file per time step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .graph import ADD_EDGE, DELETE_EDGE, GraphEvent
from .schedule import FilterSchedule, highpass_schedule, ppr_schedule

_OPS = {"+": ADD_EDGE, "-": DELETE_EDGE}
_OP_CHARS = {ADD_EDGE: "+", DELETE_EDGE: "-"}

EventBatches = List[Tuple[int, List[GraphEvent]]]


class StreamFormatError(ValueError):
    """Malformed stream or snapshot input, with file position."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


def parse_event_stream(path: Union[str, Path]) -> EventBatches:
    """Read an event file into batches grouped by timestamp, order preserved."""
    path = Path(path)
    batches: EventBatches = []
    last_t = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 5:
                raise StreamFormatError(
                    path, lineno, f"expected 5 fields `t op u v w`, got {len(parts)}"
                )
            t_str, op, u_str, v_str, w_str = parts
            if op not in _OPS:
                raise StreamFormatError(path, lineno, f"unknown op {op!r} (want + or -)")
            try:
                t = int(t_str)
                u = int(u_str)
                v = int(v_str)
                w = float(w_str)
            except ValueError as exc:
                raise StreamFormatError(path, lineno, str(exc)) from None
            if last_t is not None and t < last_t:
                raise StreamFormatError(
                    path, lineno, f"timestamp {t} regresses below {last_t}"
                )
            try:
                event = GraphEvent(time=t, kind=_OPS[op], u=u, v=v, weight=w)
            except ValueError as exc:
                raise StreamFormatError(path, lineno, str(exc)) from None
            if last_t is None or t > last_t:
                batches.append((t, []))
                last_t = t
            batches[-1][1].append(event)
    return batches


def write_event_stream(batches: EventBatches, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        for t, events in batches:
            for ev in events:
                fh.write(f"{t}\t{_OP_CHARS[ev.kind]}\t{ev.u}\t{ev.v}\t{ev.weight!r}\n")


def parse_snapshot_file(path: Union[str, Path]) -> List[Tuple[int, int, float]]:
    """Edge list `u v [w]` per line; duplicate lines accumulate downstream."""
    path = Path(path)
    edges: List[Tuple[int, int, float]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise StreamFormatError(path, lineno, f"expected `u v [w]`, got {len(parts)} fields")
            try:
                u = int(parts[0])
                v = int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise StreamFormatError(path, lineno, str(exc)) from None
            if w <= 0.0:
                raise StreamFormatError(path, lineno, f"weight must be positive, got {w}")
            edges.append((u, v, w))
    return edges


def parse_snapshots(directory: Union[str, Path]) -> List[List[Tuple[int, int, float]]]:
    """All snapshot files in a directory, lexicographic name order = time order."""
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.is_file())
    if not files:
        raise FileNotFoundError(f"no snapshot files in {directory}")
    return [parse_snapshot_file(p) for p in files]


def load_features(path: Union[str, Path]) -> np.ndarray:
    """Feature matrix from .npy or whitespace-separated text."""
    path = Path(path)
    if path.suffix == ".npy":
        x = np.load(path)
    else:
        x = np.loadtxt(path, ndmin=2)
    return np.asarray(x, np.float64)


def singleton_batches(batches: EventBatches) -> EventBatches:
    """Split time batches into per-event batches (eager CTDG processing)."""
    out: EventBatches = []
    for t, events in batches:
        for ev in events:
            out.append((t, [ev]))
    return out


@dataclass
class RunConfig:
    """Validated propagation settings shared by the CLI commands."""

    alpha: float = 0.2
    beta: float = 0.5
    r_max: float = 1e-7
    filter: str = "ppr"
    lazy: bool = False
    eager: bool = False
    checkpoint_stride: int = 1
    work_budget: int = 10**9
    workers: int = 1
    seed: int = 0
    feature_dim: int = 128

    def __post_init__(self):
        problems = []
        if not 0.0 < self.alpha < 1.0:
            problems.append(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            problems.append(f"beta must lie in [0, 1], got {self.beta}")
        if self.r_max <= 0.0:
            problems.append(f"r_max must be positive, got {self.r_max}")
        if self.filter not in ("ppr", "highpass", "both"):
            problems.append(f"filter must be ppr, highpass or both, got {self.filter!r}")
        if self.checkpoint_stride < 1:
            problems.append(f"checkpoint stride must be >= 1, got {self.checkpoint_stride}")
        if self.work_budget < 1:
            problems.append(f"work budget must be >= 1, got {self.work_budget}")
        if self.workers < 1:
            problems.append(f"workers must be >= 1, got {self.workers}")
        if self.lazy and self.eager:
            problems.append("lazy and eager modes are mutually exclusive")
        if self.feature_dim < 1:
            problems.append(f"feature dimension must be >= 1, got {self.feature_dim}")
        if problems:
            raise ValueError("; ".join(problems))

    def schedules(self) -> List[FilterSchedule]:
        low = ppr_schedule(self.alpha, self.beta, self.r_max)
        high = highpass_schedule(self.alpha, self.beta, self.r_max)
        if self.filter == "ppr":
            return [low]
        if self.filter == "highpass":
            return [high]
        return [low, high]
