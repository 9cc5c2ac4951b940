"""Forward-push propagation with signed residuals over weighted graphs.

State is an estimate/residual pair per feature column. A push on node i moves
gamma0 * r(i) into the estimate and scatters gamma * w * r(i) /
(d(i)**(1-beta) * d(j)**beta) onto each neighbor's residual. The loop drains
every node whose |residual| exceeds r_max * d**(1-beta); the estimate/residual
balance identity (see ``verify_invariant``) holds exactly throughout, which is
what makes incremental maintenance after graph mutations possible.

Zero-degree nodes never enter the push frontier. Their exact value is
gamma0 * x, which ``push_until_converged`` writes directly when it finishes
(residual folded into the estimate), so converged states meet the error bound
with equality zero at isolated nodes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from numba import njit
from scipy import sparse

from .graph import WeightedDynamicGraph
from .schedule import FilterSchedule

DEFAULT_WORK_BUDGET = 10**9


class PushPlan:
    """Frozen CSR view of a graph bound to one schedule's coefficients.

    Safe to share read-only across column workers; rebuild after any
    graph mutation.
    """

    __slots__ = (
        "n", "indptr", "indices", "weights", "deg",
        "dpow_out", "dpow_in", "coef", "eps", "schedule",
    )

    def __init__(self, graph: WeightedDynamicGraph, schedule: FilterSchedule):
        n = graph.n
        counts = np.fromiter((len(row) for row in graph.adjacency), np.int64, count=n)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(counts, out=indptr[1:])
        m2 = int(indptr[-1])
        indices = np.empty(m2, np.int64)
        weights = np.empty(m2, np.float64)
        pos = 0
        for row in graph.adjacency:
            k = len(row)
            if k:
                indices[pos:pos + k] = list(row.keys())
                weights[pos:pos + k] = list(row.values())
                pos += k
        deg = np.asarray(graph.degree, np.float64)

        beta = schedule.beta
        self.n = n
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.deg = deg
        # d**(1-beta) appears under the pushing node, d**beta under the receiver.
        self.dpow_out = np.power(deg, 1.0 - beta)
        self.dpow_in = np.power(deg, beta)
        self.coef = weights / self.dpow_in[indices] if m2 else weights
        self.eps = schedule.r_max * self.dpow_out
        self.schedule = schedule

    def balance_matrix(self) -> sparse.csr_matrix:
        """Sparse matrix with entries w_ij / (d(i)**beta * d(j)**(1-beta))."""
        n = self.n
        if n == 0:
            return sparse.csr_matrix((0, 0))
        src = np.repeat(np.arange(n), np.diff(self.indptr))
        data = self.weights / (self.dpow_in[src] * self.dpow_out[self.indices])
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def frontier_mask(self, residual: np.ndarray) -> np.ndarray:
        """Boolean mask of pushable nodes: positive degree, any column over threshold."""
        over = np.abs(residual).max(axis=1) > self.eps
        return over & (self.deg > 0.0)


@dataclass
class ConvergenceReport:
    """Outcome of a push loop; budget exhaustion is an outcome, not an error."""

    converged: bool
    pushes: int
    frontier_remaining: int
    work_budget: int

    def merge(self, other: "ConvergenceReport") -> "ConvergenceReport":
        return ConvergenceReport(
            converged=self.converged and other.converged,
            pushes=self.pushes + other.pushes,
            frontier_remaining=self.frontier_remaining + other.frontier_remaining,
            work_budget=self.work_budget,
        )


class PropagationState:
    """Estimate/residual pair for one or more feature columns (n x d arrays)."""

    __slots__ = ("estimate", "residual")

    def __init__(self, estimate: np.ndarray, residual: np.ndarray):
        if estimate.shape != residual.shape:
            raise ValueError("estimate and residual must have identical shape")
        self.estimate = estimate
        self.residual = residual

    @property
    def n_nodes(self) -> int:
        return self.estimate.shape[0]

    @property
    def n_columns(self) -> int:
        return self.estimate.shape[1]

    def copy(self) -> "PropagationState":
        return PropagationState(self.estimate.copy(), self.residual.copy())

    def grow(self, new_rows: np.ndarray) -> None:
        """Register fresh nodes: zero estimate, residual = their feature rows."""
        rows = _as_columns(new_rows)
        if rows.shape[1] != self.n_columns:
            raise ValueError("new rows must match the state's column count")
        self.estimate = np.vstack([self.estimate, np.zeros_like(rows)])
        self.residual = np.vstack([self.residual, rows.astype(np.float64)])

    def frontier(self, graph: WeightedDynamicGraph, schedule: FilterSchedule) -> np.ndarray:
        """Node ids currently over threshold (zero-degree nodes never appear)."""
        plan = PushPlan(graph, schedule)
        return np.nonzero(plan.frontier_mask(self.residual))[0]


def _as_columns(x) -> np.ndarray:
    x = np.asarray(x, np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"expected a vector or matrix of features, got shape {x.shape}")
    return x


def init_state(feature_columns) -> PropagationState:
    """Fresh state for the given column(s): zero estimate, residual = features."""
    x = _as_columns(feature_columns)
    return PropagationState(np.zeros_like(x), x.copy())


def push_node(
    graph: WeightedDynamicGraph,
    schedule: FilterSchedule,
    state: PropagationState,
    i: int,
) -> None:
    """Single push on node i (all columns), exactly the per-node update rule."""
    if state.n_nodes != graph.n:
        raise ValueError(f"state covers {state.n_nodes} nodes, graph has {graph.n}")
    d_i = graph.weighted_degree(i)
    if d_i <= 0.0:
        raise ValueError(f"cannot push zero-degree node {i}")
    row = graph.adjacency[i]
    r_old = state.residual[i].copy()
    state.estimate[i] += schedule.gamma0 * r_old
    state.residual[i] = 0.0
    if row:
        nbrs = np.fromiter(row.keys(), np.int64, count=len(row))
        wts = np.fromiter(row.values(), np.float64, count=len(row))
        deg = np.asarray(graph.degree, np.float64)
        coef = schedule.gamma * wts / (d_i ** (1.0 - schedule.beta) * deg[nbrs] ** schedule.beta)
        state.residual[nbrs] += coef[:, None] * r_old[None, :]


@njit(cache=True, nogil=True)
def _push_fifo(indptr, indices, coef, dpow_out, deg, eps, est, res, gamma0, gamma, budget):
    n = est.shape[0]
    queue = np.empty(n, np.int64)
    inq = np.zeros(n, np.uint8)
    head = 0
    count = 0
    for i in range(n):
        if deg[i] > 0.0 and abs(res[i]) > eps[i]:
            queue[(head + count) % n] = i
            inq[i] = 1
            count += 1
    pushes = 0
    while count > 0:
        i = queue[head]
        head = (head + 1) % n
        count -= 1
        inq[i] = 0
        r_i = res[i]
        if abs(r_i) <= eps[i]:
            continue
        if pushes >= budget:
            # put the node back so the caller sees an honest frontier
            head = (head - 1) % n
            queue[head] = i
            inq[i] = 1
            count += 1
            break
        res[i] = 0.0
        est[i] += gamma0 * r_i
        base = gamma * r_i / dpow_out[i]
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            res[j] += base * coef[e]
            if inq[j] == 0 and abs(res[j]) > eps[j]:
                queue[(head + count) % n] = j
                inq[j] = 1
                count += 1
        pushes += 1
    return pushes, count


@njit(cache=True, nogil=True)
def _push_lifo(indptr, indices, coef, dpow_out, deg, eps, est, res, gamma0, gamma, budget):
    n = est.shape[0]
    stack = np.empty(n, np.int64)
    ins = np.zeros(n, np.uint8)
    top = 0
    for i in range(n):
        if deg[i] > 0.0 and abs(res[i]) > eps[i]:
            stack[top] = i
            ins[i] = 1
            top += 1
    pushes = 0
    while top > 0:
        i = stack[top - 1]
        top -= 1
        ins[i] = 0
        r_i = res[i]
        if abs(r_i) <= eps[i]:
            continue
        if pushes >= budget:
            stack[top] = i
            ins[i] = 1
            top += 1
            break
        res[i] = 0.0
        est[i] += gamma0 * r_i
        base = gamma * r_i / dpow_out[i]
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            res[j] += base * coef[e]
            if ins[j] == 0 and abs(res[j]) > eps[j]:
                stack[top] = j
                ins[j] = 1
                top += 1
        pushes += 1
    return pushes, top


_KERNELS = {"fifo": _push_fifo, "lifo": _push_lifo}


def settle_isolated(plan: PushPlan, state: PropagationState, gamma0: float) -> None:
    """Fold residuals of zero-degree nodes into their estimates (exact value gamma0*x)."""
    iso = np.nonzero(plan.deg == 0.0)[0]
    if iso.size:
        state.estimate[iso] += gamma0 * state.residual[iso]
        state.residual[iso] = 0.0


def push_until_converged(
    graph: Union[WeightedDynamicGraph, PushPlan],
    schedule: Optional[FilterSchedule],
    state: PropagationState,
    work_budget: int = DEFAULT_WORK_BUDGET,
    order: str = "fifo",
    workers: int = 1,
) -> ConvergenceReport:
    """Drain the frontier of every column, column by column.

    Columns are independent: each gets its own FIFO (or LIFO) queue and the
    full work budget, so results are bit-identical for any worker count.
    The kernels release the GIL, so ``workers > 1`` runs columns on threads
    over the shared read-only plan. Ends by settling zero-degree nodes.
    """
    if isinstance(graph, PushPlan):
        plan = graph
    else:
        plan = PushPlan(graph, schedule)
    if schedule is None:
        schedule = plan.schedule
    if state.n_nodes != plan.n:
        raise ValueError(f"state covers {state.n_nodes} nodes, graph has {plan.n}")
    try:
        kernel = _KERNELS[order]
    except KeyError:
        raise ValueError(f"order must be one of {sorted(_KERNELS)}, got {order!r}")

    budget = int(work_budget)
    est, res = state.estimate, state.residual
    gamma0, gamma = schedule.gamma0, schedule.gamma

    def run_column(s: int):
        est_col = np.ascontiguousarray(est[:, s])
        res_col = np.ascontiguousarray(res[:, s])
        pushes, left = kernel(
            plan.indptr, plan.indices, plan.coef, plan.dpow_out, plan.deg,
            plan.eps, est_col, res_col, gamma0, gamma, budget,
        )
        est[:, s] = est_col
        res[:, s] = res_col
        if left:
            left = int(np.count_nonzero((plan.deg > 0.0) & (np.abs(res_col) > plan.eps)))
        return int(pushes), int(left)

    columns = range(state.n_columns)
    if workers > 1 and state.n_columns > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_column, columns))
    else:
        results = [run_column(s) for s in columns]

    total_pushes = sum(p for p, _ in results)
    remaining = sum(r for _, r in results)
    settle_isolated(plan, state, schedule.gamma0)
    return ConvergenceReport(
        converged=remaining == 0,
        pushes=total_pushes,
        frontier_remaining=remaining,
        work_budget=budget,
    )


def verify_invariant(
    graph: Union[WeightedDynamicGraph, PushPlan],
    schedule: Optional[FilterSchedule],
    state: PropagationState,
    feature_columns,
) -> float:
    """Max absolute violation of the estimate/residual balance identity.

    For every node i the converged and in-flight states alike satisfy
    est(i) + gamma0*r(i) = gamma0*x(i) + sum_j gamma*w_ij*est(j) /
    (d(i)**beta * d(j)**(1-beta)), with an empty sum at isolated nodes.
    Returns the largest deviation over all nodes and columns.
    """
    plan = graph if isinstance(graph, PushPlan) else PushPlan(graph, schedule)
    if schedule is None:
        schedule = plan.schedule
    x = _as_columns(feature_columns)
    if x.shape != state.estimate.shape:
        raise ValueError(
            f"features shape {x.shape} does not match state shape {state.estimate.shape}"
        )
    rhs = schedule.gamma * (plan.balance_matrix() @ state.estimate)
    gap = state.estimate + schedule.gamma0 * state.residual - schedule.gamma0 * x - rhs
    return float(np.abs(gap).max()) if gap.size else 0.0
