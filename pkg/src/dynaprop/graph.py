"""Mutable weighted dynamic graph with event application and snapshot diffing.

Nodes are dense integer ids. The graph is undirected: every stored weight
appears in both endpoint adjacency maps, and the cached weighted degree of a
node is the sum of its adjacency row. Re-adding an existing edge accumulates
weight; deleting removes weight and drops the entry once it reaches zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

ADD_EDGE = "add_edge"
DELETE_EDGE = "delete_edge"
ADD_NODE = "add_node"

# Weights this close to zero (relative to the deleted amount) are treated as
# a fully removed edge, so float cancellation cannot leave ghost entries.
_ZERO_WEIGHT_RTOL = 1e-12


@dataclass(frozen=True)
class GraphEvent:
    """One timestamped mutation: edge insert/delete or node registration."""

    time: int
    kind: str
    u: int
    v: Optional[int] = None
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in (ADD_EDGE, DELETE_EDGE, ADD_NODE):
            raise ValueError(f"unknown event kind: {self.kind!r}")
        if self.kind != ADD_NODE:
            if self.v is None:
                raise ValueError(f"{self.kind} event needs both endpoints")
            if self.weight <= 0.0:
                raise ValueError("edge events carry a strictly positive weight delta")


class SnapshotDiff:
    """Net weighted change between two graph states.

    Internally a signed per-node map ``net[u][v]`` (positive = weight gained,
    negative = weight lost), so that opposing events within one batch cancel
    exactly. ``added`` / ``removed`` expose the positive and negative parts.
    """

    __slots__ = ("net",)

    def __init__(self):
        self.net: Dict[int, Dict[int, float]] = {}

    def record(self, u: int, v: int, delta: float):
        """Accumulate a signed weight change on edge (u, v), both directions."""
        for a, b in ((u, v), (v, u)):
            row = self.net.setdefault(a, {})
            w = row.get(b, 0.0) + delta
            if w == 0.0:
                del row[b]
                if not row:
                    del self.net[a]
            else:
                row[b] = w

    @property
    def affected(self) -> Set[int]:
        return set(self.net.keys())

    def added(self, u: int) -> Dict[int, float]:
        return {v: w for v, w in self.net.get(u, {}).items() if w > 0.0}

    def removed(self, u: int) -> Dict[int, float]:
        return {v: -w for v, w in self.net.get(u, {}).items() if w < 0.0}

    def degree_delta(self, u: int) -> float:
        return sum(self.net.get(u, {}).values())

    def is_empty(self) -> bool:
        return not self.net

    def merge(self, other: "SnapshotDiff") -> "SnapshotDiff":
        for u, row in other.net.items():
            for v, w in row.items():
                # record() writes both directions; iterate one side only.
                if u <= v:
                    self.record(u, v, w)
        return self

    def __repr__(self):
        return f"SnapshotDiff(affected={sorted(self.affected)})"


class WeightedDynamicGraph:
    """Undirected weighted graph under edge insertions and deletions.

    Adjacency is one dict per node mapping neighbor id to positive weight.
    Weighted degrees are cached and updated incrementally; they stay within
    float round-off of the exact adjacency row sums.
    """

    def __init__(self, n: int = 0):
        self.adjacency: List[Dict[int, float]] = [dict() for _ in range(n)]
        self.degree: List[float] = [0.0] * n

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[int, int, float]], n: int = 0) -> "WeightedDynamicGraph":
        g = cls(n)
        for u, v, w in edges:
            g.ensure_node(max(u, v))
            g.add_edge(u, v, w)
        return g

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @property
    def m(self) -> int:
        return sum(len(row) for row in self.adjacency) // 2

    def ensure_node(self, u: int) -> None:
        """Register node ids 0..u; keeps the id space contiguous."""
        if u < 0:
            raise ValueError(f"node ids are non-negative, got {u}")
        while len(self.adjacency) <= u:
            self.adjacency.append(dict())
            self.degree.append(0.0)

    def _check_node(self, u: int) -> None:
        if not (0 <= u < len(self.adjacency)):
            raise KeyError(f"unknown node {u} (graph has {self.n} nodes)")

    def weighted_degree(self, u: int) -> float:
        self._check_node(u)
        return self.degree[u]

    def edge_weight(self, u: int, v: int) -> float:
        self._check_node(u)
        return self.adjacency[u].get(v, 0.0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u] if 0 <= u < self.n else False

    def neighbors(self, u: int) -> Dict[int, float]:
        self._check_node(u)
        return self.adjacency[u]

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """Each undirected edge once, as (u, v, w) with u < v."""
        for u, row in enumerate(self.adjacency):
            for v, w in row.items():
                if u < v:
                    yield u, v, w

    def add_edge(self, u: int, v: int, weight: float = 1.0) -> None:
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ValueError("self loops are not supported")
        if weight <= 0.0:
            raise ValueError("edge weight delta must be positive")
        self.adjacency[u][v] = self.adjacency[u].get(v, 0.0) + weight
        self.adjacency[v][u] = self.adjacency[u][v]
        self.degree[u] += weight
        self.degree[v] += weight

    def remove_edge(self, u: int, v: int, weight: float) -> None:
        self._check_node(u)
        self._check_node(v)
        current = self.adjacency[u].get(v)
        if current is None:
            raise KeyError(f"edge ({u}, {v}) does not exist")
        if weight <= 0.0:
            raise ValueError("edge weight delta must be positive")
        if weight > current * (1.0 + _ZERO_WEIGHT_RTOL):
            raise ValueError(
                f"cannot delete weight {weight} from edge ({u}, {v}) holding {current}"
            )
        remaining = current - weight
        if abs(remaining) <= abs(weight) * _ZERO_WEIGHT_RTOL:
            del self.adjacency[u][v]
            del self.adjacency[v][u]
        else:
            self.adjacency[u][v] = remaining
            self.adjacency[v][u] = remaining
        self.degree[u] -= weight
        self.degree[v] -= weight
        if not self.adjacency[u]:
            self.degree[u] = 0.0
        if not self.adjacency[v]:
            self.degree[v] = 0.0

    def apply_event(self, event: GraphEvent) -> SnapshotDiff:
        """Mutate in place; returns the diff describing exactly this event."""
        diff = SnapshotDiff()
        if event.kind == ADD_NODE:
            self.ensure_node(event.u)
            return diff
        self.ensure_node(event.u)
        self.ensure_node(event.v)
        if event.kind == ADD_EDGE:
            self.add_edge(event.u, event.v, event.weight)
            diff.record(event.u, event.v, event.weight)
        else:
            self.remove_edge(event.u, event.v, event.weight)
            diff.record(event.u, event.v, -event.weight)
        return diff

    def apply_events(self, events: Iterable[GraphEvent]) -> SnapshotDiff:
        """Apply a batch of simultaneous events; returns the merged net diff."""
        diff = SnapshotDiff()
        for ev in events:
            diff.merge(self.apply_event(ev))
        return diff

    def apply_diff(self, diff: SnapshotDiff) -> None:
        """Replay a diff produced against this graph's current state."""
        for u, row in diff.net.items():
            self.ensure_node(u)
            for v, w in row.items():
                if u < v:
                    self.ensure_node(v)
                    if w > 0.0:
                        self.add_edge(u, v, w)
                    else:
                        self.remove_edge(u, v, -w)

    def copy(self) -> "WeightedDynamicGraph":
        g = WeightedDynamicGraph()
        g.adjacency = [dict(row) for row in self.adjacency]
        g.degree = list(self.degree)
        return g

    def recomputed_degrees(self) -> List[float]:
        return [sum(row.values()) for row in self.adjacency]

    def __repr__(self):
        return f"WeightedDynamicGraph(n={self.n}, m={self.m})"


def diff_snapshots(
    prev: WeightedDynamicGraph, next_edges: Iterable[Tuple[int, int, float]]
) -> SnapshotDiff:
    """Net change turning ``prev`` into the edge list ``next_edges``.

    Duplicate (u, v) lines in the edge list accumulate weight. The result
    satisfies: replaying it on ``prev`` reproduces the next snapshot exactly.
    """
    target: Dict[Tuple[int, int], float] = {}
    for u, v, w in next_edges:
        if u == v:
            raise ValueError("self loops are not supported")
        key = (min(u, v), max(u, v))
        target[key] = target.get(key, 0.0) + w
    diff = SnapshotDiff()
    for (u, v), w in target.items():
        old = prev.edge_weight(u, v) if max(u, v) < prev.n else 0.0
        if w != old:
            diff.record(u, v, w - old)
    for u, v, old in prev.edges():
        if (u, v) not in target:
            diff.record(u, v, -old)
    return diff
