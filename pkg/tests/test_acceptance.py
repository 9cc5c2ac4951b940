"""Acceptance suite: one criterion per test, one PASS/FAIL line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and the reported throughput number.
"""

import time

import numpy as np
import pytest

from dynaprop import (
    ADD_EDGE,
    DELETE_EDGE,
    FeatureStore,
    GraphEvent,
    StreamSession,
    WeightedDynamicGraph,
    apply_batch_update,
    apply_single_event,
    dense_propagation,
    highpass_schedule,
    init_state,
    ppr_schedule,
    push_until_converged,
    verify_error_bound,
    verify_invariant,
)

from conftest import random_event, random_graph

SEVEN_EVENTS = [
    (1, [GraphEvent(1, ADD_EDGE, 0, 4), GraphEvent(1, ADD_EDGE, 1, 3)]),
    (2, [GraphEvent(2, ADD_EDGE, 0, 3), GraphEvent(2, ADD_EDGE, 2, 3)]),
    (3, [GraphEvent(3, ADD_EDGE, 2, 4)]),
    (4, [GraphEvent(4, DELETE_EDGE, 2, 3)]),
    (5, [GraphEvent(5, ADD_EDGE, 0, 2)]),
]


def _report(name, ok, detail):
    print(f"\n[{name}] {'PASS' if ok else 'FAIL'} {detail}", flush=True)
    assert ok, f"{name}: {detail}"


def _schedule_grid():
    # cycle (filter, beta) combinations across case indices
    combos = []
    for make in (ppr_schedule, highpass_schedule):
        for beta in (0.0, 0.5, 1.0):
            combos.append((make, beta))
    return combos


def test_invariant_suite():
    """200 random graphs, 50 events each, gap <= 1e-9 * ||x||_inf throughout."""
    start = time.perf_counter()
    combos = _schedule_grid()
    worst = 0.0
    for case in range(200):
        rng = np.random.default_rng(1_000 + case)
        make, beta = combos[case % len(combos)]
        n = int(rng.integers(20, 201))
        g = random_graph(rng, n, avg_degree=4.0, w_low=0.05, w_high=2.0)
        x = rng.uniform(-1.0, 1.0, n)
        sched = make(0.2, beta=beta, r_max=1e-7)
        tol = 1e-9 * np.abs(x).max()
        st = init_state(x)
        gap = verify_invariant(g, sched, st, x)
        worst = max(worst, gap)
        assert gap <= tol, f"case {case}: init gap {gap}"
        push_until_converged(g, sched, st)
        gap = verify_invariant(g, sched, st, x)
        worst = max(worst, gap)
        assert gap <= tol, f"case {case}: post-init-convergence gap {gap}"
        for k in range(50):
            ev = random_event(rng, g, t=k, insert_prob=0.7)
            apply_single_event(g, st, ev, x, sched, eager=False)
            gap = verify_invariant(g, sched, st, x)
            worst = max(worst, gap)
            assert gap <= tol, f"case {case} event {k}: post-event gap {gap}"
            push_until_converged(g, sched, st)
            gap = verify_invariant(g, sched, st, x)
            worst = max(worst, gap)
            assert gap <= tol, f"case {case} event {k}: post-convergence gap {gap}"
    elapsed = time.perf_counter() - start
    _report(
        "invariant-suite",
        elapsed < 60.0,
        f"200 graphs x 50 events, worst gap {worst:.2e}, {elapsed:.1f}s (limit 60s)",
    )


def _random_timeline_case(case):
    """One timeline: evolving graph, its event batches, schedule, features."""
    rng = np.random.default_rng(7_000 + case)
    make, beta = _schedule_grid()[case % 6]
    n = int(rng.integers(20, 101))
    d = int(rng.integers(1, 9))
    g0 = random_graph(rng, n, avg_degree=3.0)
    x = rng.uniform(-0.5, 0.5, (n, d))
    sched = make(0.2, beta=beta, r_max=1e-6)
    probe = g0.copy()
    batches = []
    for t in range(1, 21):
        events = []
        for _ in range(int(rng.integers(1, 6))):
            ev = random_event(rng, probe, t, insert_prob=0.7)
            probe.apply_event(ev)
            events.append(ev)
        batches.append((t, events))
    return g0, batches, sched, x


_TIMELINE_CACHE = {}


def _run_timeline_case(case):
    if case in _TIMELINE_CACHE:
        return _TIMELINE_CACHE[case]
    g0, batches, sched, x = _random_timeline_case(case)
    session = StreamSession(g0.copy(), FeatureStore(matrix=x), [sched])
    session.initialize(0)
    replay = g0.copy()
    checkpoints = []
    worst = 0.0
    for t, events in batches:
        session.apply_event_batch(t, events)
        for ev in events:
            replay.apply_event(ev)
        z = session.lanes[0].state.estimate.copy()
        exact = dense_propagation(replay, sched, x, tail_tol=sched.r_max * 1e-3)
        rep = verify_error_bound(z, exact, np.asarray(replay.degree), sched)
        worst = max(worst, rep.max_ratio)
        checkpoints.append((t, z, rep))
    result = (replay, sched, x, checkpoints, worst, session.reports[sched.tag])
    _TIMELINE_CACHE[case] = result
    return result


def test_error_bound_on_random_timelines():
    """50 timelines x 20 checkpoints: every entry within the degree bound."""
    start = time.perf_counter()
    worst = 0.0
    violations = 0
    for case in range(50):
        _, _, _, checkpoints, case_worst, report = _run_timeline_case(case)
        assert report.converged
        worst = max(worst, case_worst)
        violations += sum(rep.violations for _, _, rep in checkpoints)
    elapsed = time.perf_counter() - start
    _report(
        "per-node-error-bound",
        violations == 0 and worst <= 1.0 and elapsed < 120.0,
        f"50 timelines, worst |err|/bound {worst:.4f}, "
        f"{violations} violations, {elapsed:.1f}s (limit 120s)",
    )


def test_incremental_matches_scratch():
    """Final incremental checkpoint within 2x bound of from-scratch propagation."""
    worst = 0.0
    for case in range(50):
        replay, sched, x, checkpoints, _, _ = _run_timeline_case(case)
        scratch = init_state(x)
        push_until_converged(replay, sched, scratch)
        _, z_final, _ = checkpoints[-1]
        bound = sched.error_bound(np.asarray(replay.degree))[:, None]
        diff = np.abs(z_final - scratch.estimate)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(bound > 0, diff / bound, np.where(diff == 0, 0.0, np.inf))
        worst = max(worst, float(ratio.max()))
    _report(
        "incremental-vs-scratch",
        worst <= 2.0,
        f"50 timelines, worst |inc - scratch|/bound {worst:.4f} (limit 2)",
    )


def test_round_trip_insert_delete():
    """Insert + delete an edge restores the state to within 2x bound."""
    worst = 0.0
    for case in range(10):
        rng = np.random.default_rng(40 + case)
        n = int(rng.integers(20, 80))
        g = random_graph(rng, n)
        x = rng.uniform(-1, 1, n)
        sched = ppr_schedule(0.2, beta=0.5, r_max=1e-7)
        st = init_state(x)
        push_until_converged(g, sched, st)
        baseline = st.estimate.copy()
        u, v = 1, n - 2
        if g.has_edge(u, v):
            continue
        apply_single_event(g, st, GraphEvent(1, ADD_EDGE, u, v, weight=1.1), x, sched)
        apply_single_event(g, st, GraphEvent(2, DELETE_EDGE, u, v, weight=1.1), x, sched)
        bound = sched.error_bound(np.asarray(g.degree))[:, None]
        diff = np.abs(st.estimate - baseline)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(bound > 0, diff / bound, np.where(diff == 0, 0.0, np.inf))
        worst = max(worst, float(ratio.max()))
    _report(
        "round-trip",
        worst <= 2.0,
        f"insert+delete deviation {worst:.4f} x bound (limit 2)",
    )


def test_round_trip_seven_event_sequence():
    """The five-node event list with its t=4 deletion, against a never-inserted run."""
    x = np.random.default_rng(5).uniform(-0.5, 0.5, (5, 3))
    sched = ppr_schedule(0.2, beta=0.5, r_max=1e-7)

    def run(batches):
        session = StreamSession(WeightedDynamicGraph(5), FeatureStore(matrix=x), [sched])
        session.initialize(0)
        for t, events in batches:
            session.apply_event_batch(t, events)
        return session

    main = run(SEVEN_EVENTS[:4])  # through the deletion at t=4
    alt = run([
        (1, SEVEN_EVENTS[0][1]),
        (2, [GraphEvent(2, ADD_EDGE, 0, 3)]),  # never insert (2,3)
        (3, SEVEN_EVENTS[2][1]),
    ])
    # identical graphs after t=4 vs t=3: the insert/delete pair cancelled
    assert sorted(main.graph.edges()) == sorted(alt.graph.edges())
    bound = sched.error_bound(np.asarray(main.graph.degree))[:, None]
    diff = np.abs(main.lanes[0].state.estimate - alt.lanes[0].state.estimate)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, diff / bound, np.where(diff == 0, 0.0, np.inf))
    worst = float(ratio.max())
    exact = dense_propagation(main.graph, sched, x, tail_tol=sched.r_max * 1e-3)
    rep = verify_error_bound(main.lanes[0].state.estimate, exact,
                             np.asarray(main.graph.degree), sched)
    _report(
        "round-trip-event-list",
        worst <= 2.0 and rep.passed,
        f"t4-deletion deviation {worst:.4f} x bound (limit 2), oracle ratio {rep.max_ratio:.4f}",
    )


def test_batch_equals_sequential():
    """A k-edge diff in one batch vs k singleton batches: both pass the bound."""
    worst = 0.0
    for case in range(12):
        rng = np.random.default_rng(900 + case)
        k = int(rng.integers(2, 21))
        base = random_graph(rng, 60)
        x = rng.uniform(-1, 1, (60, 2))
        sched = (ppr_schedule if case % 2 == 0 else highpass_schedule)(0.2, 0.5, 1e-6)
        probe = base.copy()
        events = []
        for _ in range(k):
            ev = random_event(rng, probe, 1, insert_prob=0.7)
            probe.apply_event(ev)
            events.append(ev)

        g_batch = base.copy()
        st_batch = init_state(x)
        push_until_converged(g_batch, sched, st_batch)
        diff = g_batch.apply_events(events)
        apply_batch_update(g_batch, st_batch, diff, x, sched)

        g_seq = base.copy()
        st_seq = init_state(x)
        push_until_converged(g_seq, sched, st_seq)
        for ev in events:
            apply_single_event(g_seq, st_seq, ev, x, sched, eager=True)

        exact = dense_propagation(g_batch, sched, x, tail_tol=sched.r_max * 1e-3)
        deg = np.asarray(g_batch.degree)
        for st in (st_batch, st_seq):
            rep = verify_error_bound(st.estimate, exact, deg, sched)
            worst = max(worst, rep.max_ratio)
    _report(
        "batch-vs-sequential",
        worst <= 1.0,
        f"12 diffs (k<=20), worst |err|/bound {worst:.4f} (limit 1)",
    )


def test_monotonic_r_max():
    """Tightening r_max never increases the degree-normalized error."""
    rng = np.random.default_rng(77)
    g = random_graph(rng, 100, avg_degree=5.0)
    x = rng.uniform(-1, 1, 100)
    deg = np.asarray(g.degree)
    live = deg > 0
    exact = dense_propagation(g, ppr_schedule(0.2, 0.5, 1e-7), x, tail_tol=1e-13)
    errors = []
    for r_max in (1e-3, 1e-5, 1e-7):
        sched = ppr_schedule(0.2, beta=0.5, r_max=r_max)
        st = init_state(x)
        push_until_converged(g, sched, st)
        err = np.abs(st.estimate.ravel() - exact.ravel())[live] / deg[live] ** 0.5
        errors.append(float(err.max()))
    ok = errors[0] >= errors[1] >= errors[2]
    _report(
        "monotone-r-max",
        ok,
        f"normalized errors at (1e-3, 1e-5, 1e-7): "
        f"{errors[0]:.3e} >= {errors[1]:.3e} >= {errors[2]:.3e}",
    )


def test_throughput_soft_gate():
    """1e5 streamed unit-weight events, 1e4 nodes, d=32, lazy, 10 checkpoints."""
    rng = np.random.default_rng(123)
    n = 10_000
    g = WeightedDynamicGraph(n)
    for _ in range(20_000):
        u, v = rng.integers(0, n, 2)
        if u != v:
            g.add_edge(int(u), int(v), 1.0)

    n_events = 100_000
    shadow = g.copy()
    events = []
    for t in range(1, n_events + 1):
        if rng.random() < 0.15 and shadow.m > 0:
            # delete one unit from a random existing edge
            row = None
            while row is None:
                u = int(rng.integers(0, n))
                if shadow.adjacency[u]:
                    row = shadow.adjacency[u]
            v = next(iter(row))
            w = min(1.0, row[v])
            ev = GraphEvent(t, DELETE_EDGE, u, v, weight=w)
        else:
            while True:
                u, v = rng.integers(0, n, 2)
                if u != v:
                    break
            ev = GraphEvent(t, ADD_EDGE, int(u), int(v), weight=1.0)
        shadow.apply_event(ev)
        events.append(ev)

    features = FeatureStore(dim=32, seed=9)
    sched = ppr_schedule(0.2, beta=0.5, r_max=1e-7)
    start = time.perf_counter()
    session = StreamSession(
        g, features, [sched], lazy=True, checkpoint_stride=n_events // 10
    )
    session.initialize(0)
    for ev in events:
        session.apply_event_batch(ev.time, [ev])
    timeline = session.finish()[0]
    elapsed = time.perf_counter() - start
    report = session.reports[sched.tag]
    rate = n_events / elapsed
    _report(
        "throughput",
        elapsed < 300.0 and report.converged and len(timeline) == 11,
        f"{n_events} events, d=32, {len(timeline) - 1} stream checkpoints: "
        f"{elapsed:.1f}s ({rate:,.0f} events/s, {report.pushes} pushes; soft limit 300s)",
    )
