import shutil
import subprocess

import numpy as np
import pytest


def periodic_dtdg(n_nodes=50, n_snapshots=20, edges_per_set=90, seed=0):
    """Two disjoint edge sets toggling with period 2 across snapshots."""
    rng = np.random.default_rng(seed)
    sets = []
    used = set()
    for _ in range(2):
        edges = set()
        while len(edges) < edges_per_set:
            u, v = rng.integers(0, n_nodes, 2)
            if u == v:
                continue
            e = (min(int(u), int(v)), max(int(u), int(v)))
            if e not in used:
                used.add(e)
                edges.add(e)
        sets.append(edges)
    return [sets[t % 2] for t in range(n_snapshots)]


def write_snapshots(edge_sets, directory):
    directory.mkdir(parents=True, exist_ok=True)
    for t, edges in enumerate(edge_sets):
        lines = [f"{u} {v} 1" for u, v in sorted(edges)]
        (directory / f"{t:03d}.tsv").write_text("\n".join(lines) + "\n")


def run_propagation(snapshot_dir, out_dir, seed=0, feature_dim=16, filter_kind="both",
                    r_max="1e-6"):
    """Drive the propagation engine through its CLI; returns the output dir."""
    exe = shutil.which("dynaprop")
    assert exe, "the propagation engine CLI must be installed"
    subprocess.run(
        [
            exe, "propagate", "--snapshots", str(snapshot_dir),
            "--filter", filter_kind, "--feature-dim", str(feature_dim),
            "--seed", str(seed), "--rmax", r_max, "--out", str(out_dir),
        ],
        check=True, capture_output=True, text=True,
    )
    return out_dir


@pytest.fixture(scope="session")
def periodic_run(tmp_path_factory):
    """Embeddings for the toggling DTDG, produced once per test session."""
    root = tmp_path_factory.mktemp("periodic")
    edge_sets = periodic_dtdg(seed=0)
    snap_dir = root / "snaps"
    write_snapshots(edge_sets, snap_dir)
    emb_dir = run_propagation(snap_dir, root / "emb", seed=0)
    return edge_sets, snap_dir, emb_dir
