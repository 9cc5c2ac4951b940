"""Reference propagation by truncated power series, for tests and `verify`.

Computes sum_k gamma0 * gamma**k * P**k @ X directly, with
P = D**(-beta) A D**(beta-1) and zero rows/columns at zero-degree nodes.
Intentionally simple and small-scale; this is the ground truth the push
engine is checked against, so it must stay independent of the push code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .graph import WeightedDynamicGraph
from .push import _as_columns
from .schedule import FilterSchedule

MAX_DENSE_NODES = 5000


def propagation_matrix(graph: WeightedDynamicGraph, beta: float) -> sparse.csr_matrix:
    """P with entries w_ij / (d(i)**beta * d(j)**(1-beta)); zero-degree rows are zero."""
    n = graph.n
    rows, cols, vals = [], [], []
    deg = np.asarray(graph.degree, np.float64)
    with np.errstate(divide="ignore"):
        left = np.where(deg > 0.0, np.power(deg, -beta), 0.0)
        right = np.where(deg > 0.0, np.power(deg, beta - 1.0), 0.0)
    for u, v, w in graph.edges():
        rows.extend((u, v))
        cols.extend((v, u))
        vals.extend((w * left[u] * right[v], w * left[v] * right[u]))
    return sparse.csr_matrix(
        (np.asarray(vals, np.float64), (np.asarray(rows), np.asarray(cols))), shape=(n, n)
    )


def dense_propagation(
    graph: WeightedDynamicGraph,
    schedule: FilterSchedule,
    features,
    tail_tol: float | None = None,
    max_terms: int = 100_000,
) -> np.ndarray:
    """Truncated series sum_{k<=K} gamma0*gamma**k P**k X.

    Stops once the sup-norm of the next term falls below ``tail_tol``
    (default r_max * 1e-3, negligible next to the push error bound).
    """
    if graph.n > MAX_DENSE_NODES:
        raise ValueError(
            f"reference propagation is limited to {MAX_DENSE_NODES} nodes, got {graph.n}"
        )
    x = _as_columns(features)
    if x.shape[0] != graph.n:
        raise ValueError(f"features cover {x.shape[0]} nodes, graph has {graph.n}")
    if tail_tol is None:
        tail_tol = schedule.r_max * 1e-3
    p = propagation_matrix(graph, schedule.beta)
    term = schedule.gamma0 * x
    acc = term.copy()
    for _ in range(max_terms):
        term = schedule.gamma * (p @ term)
        if term.size == 0 or np.abs(term).max() < tail_tol:
            break
        acc += term
    else:
        raise RuntimeError(f"series did not reach tail tolerance within {max_terms} terms")
    return acc


@dataclass
class BoundReport:
    """Per-entry comparison of an approximation against the reference values."""

    max_ratio: float
    node: int
    column: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.0


def verify_error_bound(
    approx: np.ndarray,
    exact: np.ndarray,
    degrees,
    schedule: FilterSchedule,
) -> BoundReport:
    """Ratio |approx - exact| / error_bound(degree) per entry; passes iff max <= 1.

    Zero-degree nodes have a zero bound: any nonzero deviation there is an
    infinite ratio, an exact match is ratio zero.
    """
    approx = _as_columns(approx)
    exact = _as_columns(exact)
    if approx.shape != exact.shape:
        raise ValueError(f"shape mismatch: {approx.shape} vs {exact.shape}")
    deg = np.asarray(degrees, np.float64)
    if deg.shape[0] != approx.shape[0]:
        raise ValueError("degree vector does not match the matrices")
    diff = np.abs(approx - exact)
    bound = schedule.error_bound(deg)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0.0, diff / bound, np.where(diff == 0.0, 0.0, np.inf))
    if ratio.size == 0:
        return BoundReport(0.0, -1, -1, 0)
    flat = int(np.argmax(ratio))
    node, column = np.unravel_index(flat, ratio.shape)
    return BoundReport(
        max_ratio=float(ratio[node, column]),
        node=int(node),
        column=int(column),
        violations=int(np.count_nonzero(ratio > 1.0)),
    )
