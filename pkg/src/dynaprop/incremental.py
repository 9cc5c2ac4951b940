"""Restore the estimate/residual balance after graph mutations, then re-push.

A batch update runs in three phases over the affected nodes (those whose
degree or neighbor set changed):

1. rescale: est(u) is scaled by (d_new/d_old)**(1-beta) so that every
   neighbor's balance term est(u)/d(u)**(1-beta) keeps its old value, and
   r(u) absorbs the scaling so est(u) + gamma0*r(u) is unchanged.
2. increment: r(u) absorbs the change of u's own balance right-hand side,
   from the degree power in the denominator and from gained/lost neighbors.
3. push: the ordinary frontier drain tightens residuals back under threshold.

Phases 1 and 2 are exact (up to round-off) for any residual size, so pushing
may be deferred arbitrarily (lazy streams) without breaking correctness.

Nodes that lose all edges are reset to the canonical isolated state
(estimate 0, residual = feature value); this equals the d_new -> 0 limit of
the phase formulas. Their former balance ratio est/d**(1-beta) is preserved
for the neighbor terms of phase 2, where the post-rescale value would be 0/0.
"""

from __future__ import annotations

from typing import Dict, Mapping, Optional

import numpy as np

from .graph import GraphEvent, SnapshotDiff, WeightedDynamicGraph
from .push import (
    DEFAULT_WORK_BUDGET,
    ConvergenceReport,
    PropagationState,
    PushPlan,
    _as_columns,
    push_until_converged,
)
from .schedule import FilterSchedule


def rescale_estimate(
    state: PropagationState,
    u: int,
    d_old: float,
    d_new: float,
    schedule: FilterSchedule,
) -> None:
    """Phase-1 update for one node: scale est(u), compensate r(u).

    Keeps est(u) + gamma0*r(u) exactly unchanged. With d_new = 0 the estimate
    is folded back into the residual (the zero limit of the scaling); the
    caller completes the isolated reset with the node's feature value.
    """
    est, res = state.estimate, state.residual
    if d_old <= 0.0:
        if np.any(est[u] != 0.0):
            raise ValueError(
                f"node {u} has no prior edges but a nonzero estimate; reset it first"
            )
        return
    if d_new <= 0.0:
        res[u] += est[u] / schedule.gamma0
        est[u] = 0.0
        return
    exp = 1.0 - schedule.beta
    p_old = d_old**exp
    p_new = d_new**exp
    scaled = est[u] * (p_new / p_old)
    est[u] = scaled
    res[u] += scaled * (p_old - p_new) / (schedule.gamma0 * p_new)


def residual_increment(
    graph: WeightedDynamicGraph,
    state: PropagationState,
    u: int,
    d_old: float,
    d_new: float,
    x_u,
    added: Mapping[int, float],
    removed: Mapping[int, float],
    schedule: FilterSchedule,
    neighbor_ratio: Optional[Dict[int, np.ndarray]] = None,
) -> None:
    """Phase-2 update for one node: absorb its own balance change into r(u).

    Must run after phase 1 on every affected node; neighbor estimates and
    degrees are read at their new values. ``neighbor_ratio`` supplies
    est(v)/d(v)**(1-beta) for neighbors whose post-update degree is zero
    (their estimate was reset, the pre-reset ratio is what the terms need).
    """
    if d_new <= 0.0:
        raise ValueError("residual_increment requires a positive new degree")
    est, res = state.estimate, state.residual
    g0, g, beta = schedule.gamma0, schedule.gamma, schedule.beta
    x_u = np.asarray(x_u, np.float64)

    def ratio(v: int) -> np.ndarray:
        if neighbor_ratio is not None and v in neighbor_ratio:
            return neighbor_ratio[v]
        d_v = graph.weighted_degree(v)
        if d_v > 0.0:
            return est[v] / d_v ** (1.0 - beta)
        if np.any(est[v] != 0.0):
            raise ValueError(
                f"neighbor {v} is isolated with a nonzero estimate; it must be reset first"
            )
        return est[v]

    p_new = d_new**beta
    delta = (est[u] + g0 * res[u] - g0 * x_u) * ((d_old**beta - p_new) / p_new)
    for v, w in added.items():
        delta = delta + (g * w / p_new) * ratio(v)
    for v, w in removed.items():
        delta = delta - (g * w / p_new) * ratio(v)
    res[u] += delta / g0


def apply_batch_update(
    graph: WeightedDynamicGraph,
    state: PropagationState,
    diff: SnapshotDiff,
    features,
    schedule: FilterSchedule,
    work_budget: int = DEFAULT_WORK_BUDGET,
    push: bool = True,
    order: str = "fifo",
    workers: int = 1,
) -> Optional[ConvergenceReport]:
    """Restore the balance identity on the already-mutated graph, then push.

    ``graph`` must reflect the new state and ``diff`` describe how it got
    there. Runs both maintenance phases over the affected nodes (all
    rescales first, then all increments), then drains the frontier unless
    ``push`` is False (lazy mode).
    """
    x = _as_columns(features)
    if x.shape[0] != graph.n:
        raise ValueError(f"features cover {x.shape[0]} nodes, graph has {graph.n}")
    if state.n_nodes != graph.n:
        raise ValueError(f"state covers {state.n_nodes} nodes, graph has {graph.n}")

    affected = sorted(diff.affected)
    est = state.estimate
    exp = 1.0 - schedule.beta
    ratios: Dict[int, np.ndarray] = {}
    degrees: Dict[int, tuple] = {}

    for u in affected:
        d_new = graph.weighted_degree(u)
        d_old = max(d_new - diff.degree_delta(u), 0.0)
        degrees[u] = (d_old, d_new)
        if d_old == 0.0:
            # first edges of a previously isolated node: canonical restart
            ratios[u] = np.zeros(state.n_columns)
            est[u] = 0.0
            state.residual[u] = x[u]
        elif d_new == 0.0:
            # all edges gone: preserve the old balance ratio for phase 2,
            # then reset to the exact isolated state
            ratios[u] = est[u] / d_old**exp
            est[u] = 0.0
            state.residual[u] = x[u]
        else:
            rescale_estimate(state, u, d_old, d_new, schedule)
            ratios[u] = est[u] / d_new**exp

    for u in affected:
        d_old, d_new = degrees[u]
        if d_new == 0.0:
            continue
        residual_increment(
            graph, state, u, d_old, d_new, x[u],
            diff.added(u), diff.removed(u), schedule,
            neighbor_ratio=ratios,
        )

    if push:
        return push_until_converged(
            graph, schedule, state, work_budget=work_budget, order=order, workers=workers
        )
    return None


def apply_single_event(
    graph: WeightedDynamicGraph,
    state: PropagationState,
    event: GraphEvent,
    features,
    schedule: FilterSchedule,
    eager: bool = True,
    work_budget: int = DEFAULT_WORK_BUDGET,
    order: str = "fifo",
) -> Optional[ConvergenceReport]:
    """Apply one event to the graph and maintain the state.

    With ``eager`` the frontier is drained immediately; otherwise only the
    O(1) balance restoration runs and pushing is deferred to the next
    checkpoint. ``features`` must cover every node the event references.
    """
    diff = graph.apply_event(event)
    x = _as_columns(features)
    if x.shape[0] < graph.n:
        raise ValueError(f"features cover {x.shape[0]} nodes, graph now has {graph.n}")
    if state.n_nodes < graph.n:
        state.grow(x[state.n_nodes:graph.n])
    return apply_batch_update(
        graph, state, diff, x[:graph.n], schedule,
        work_budget=work_budget, push=eager, order=order,
    )
