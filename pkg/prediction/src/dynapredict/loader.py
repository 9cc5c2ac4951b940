"""Reader for exported embedding timelines (`.dynp` binary, `.tsv` debug).

Implemented against the documented layout so this package has no code
dependency on the propagation engine: little-endian header
(magic "DYNP", version u32, dtype u32 with 0=f64/1=f32, n/d/T u64,
beta/gamma0/gamma/r_max f64, feature seed i64 with -1 for none,
tag length u32 + utf-8 tag), then T i64 checkpoint times and T row-major
n x d matrices.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

_HEADER = struct.Struct("<4sII QQQ dddd q I")
_MAGIC = b"DYNP"


@dataclass
class Timeline:
    """Loaded checkpoint stack plus the propagation parameters that made it."""

    times: List[int]
    matrices: np.ndarray  # (T, n, d) float64
    beta: float
    gamma0: float
    gamma: float
    r_max: float
    feature_seed: Optional[int]
    tag: str

    @property
    def n_nodes(self) -> int:
        return self.matrices.shape[1]

    @property
    def width(self) -> int:
        return self.matrices.shape[2]

    def __len__(self) -> int:
        return self.matrices.shape[0]

    def deltas(self) -> np.ndarray:
        """First-order differences between consecutive checkpoints, (T-1, n, d)."""
        if len(self) < 2:
            raise ValueError("need at least two checkpoints to form a delta sequence")
        return np.diff(self.matrices, axis=0)


def load_timeline(path: Union[str, Path]) -> Timeline:
    path = Path(path)
    if path.suffix == ".tsv":
        return _load_tsv(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, code, n, d, t, beta, gamma0, gamma, r_max, seed, taglen = (
            _HEADER.unpack(head)
        )
        if magic != _MAGIC:
            raise ValueError(f"{path}: not an embedding timeline (magic {magic!r})")
        if version != 1:
            raise ValueError(f"{path}: unsupported version {version}")
        if code not in (0, 1):
            raise ValueError(f"{path}: unknown dtype code {code}")
        tag = fh.read(taglen).decode("utf-8")
        times = np.frombuffer(fh.read(8 * t), "<i8")
        width = 8 if code == 0 else 4
        raw = fh.read(t * n * d * width)
        if len(raw) != t * n * d * width:
            raise ValueError(f"{path}: truncated matrix data")
        z = np.frombuffer(raw, f"<f{width}").astype(np.float64).reshape(t, n, d)
    return Timeline(
        times=[int(v) for v in times],
        matrices=z,
        beta=beta, gamma0=gamma0, gamma=gamma, r_max=r_max,
        feature_seed=None if seed == -1 else int(seed),
        tag=tag,
    )


def _load_tsv(path: Path) -> Timeline:
    meta = {}
    times: List[int] = []
    rows: List[List[List[float]]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("\t")
                if key == "checkpoint":
                    times.append(int(value))
                    rows.append([])
                else:
                    meta[key] = value
            else:
                rows[-1].append([float(v) for v in line.split("\t")])
    seed = meta.get("seed", "none")
    return Timeline(
        times=times,
        matrices=np.asarray(rows, np.float64),
        beta=float(meta["beta"]), gamma0=float(meta["gamma0"]),
        gamma=float(meta["gamma"]), r_max=float(meta["r_max"]),
        feature_seed=None if seed == "none" else int(seed),
        tag=meta.get("tag", ""),
    )


def concat_timelines(parts: List[Timeline]) -> Timeline:
    """Column-wise concatenation of timelines sharing times and node counts."""
    first = parts[0]
    if len(parts) == 1:
        return first
    for other in parts[1:]:
        if other.times != first.times or other.n_nodes != first.n_nodes:
            raise ValueError("timelines do not share checkpoint times and node sets")
    return Timeline(
        times=list(first.times),
        matrices=np.concatenate([p.matrices for p in parts], axis=2),
        beta=first.beta, gamma0=first.gamma0, gamma=first.gamma, r_max=first.r_max,
        feature_seed=first.feature_seed,
        tag="+".join(p.tag for p in parts),
    )
