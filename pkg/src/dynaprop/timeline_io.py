"""Embedding timeline serialization: `.dynp` binary and `.tsv` debug text.

Binary layout (little-endian), version 1:

    magic    4 bytes  b"DYNP"
    version  u32
    dtype    u32      0 = float64, 1 = float32
    n, d, T  u64 each (aligned node count, width, checkpoint count)
    beta, gamma0, gamma, r_max   f64 each
    seed     i64      feature RNG seed, -1 when features were provided
    taglen   u32, followed by the utf-8 schedule tag
    times    T x i64
    data     T matrices of n x d values, row-major, in `dtype`

Checkpoints are written aligned: nodes born after a checkpoint appear as
zero rows. 64-bit exports round-trip bit-exactly; 32-bit exports lose at
most float32 precision.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .engine import EmbeddingTimeline
from .schedule import FilterSchedule

MAGIC = b"DYNP"
VERSION = 1
_HEADER = struct.Struct("<4sII QQQ dddd q I")
_DTYPES = {0: np.float64, 1: np.float32}
_DTYPE_CODES = {"f64": 0, "f32": 1, "float64": 0, "float32": 1}


def export_timeline(
    timeline: EmbeddingTimeline,
    path: Union[str, Path],
    dtype: str = "f64",
) -> None:
    """Write a timeline; format chosen by suffix (.tsv = text, else binary)."""
    path = Path(path)
    if path.suffix == ".tsv":
        _write_tsv(timeline, path)
        return
    try:
        code = _DTYPE_CODES[dtype]
    except KeyError:
        raise ValueError(f"dtype must be f64 or f32, got {dtype!r}")
    z = timeline.aligned()
    t, n, d = z.shape
    sched = timeline.schedule
    if sched is None:
        raise ValueError("timeline carries no schedule parameters to serialize")
    seed = -1 if timeline.feature_seed is None else int(timeline.feature_seed)
    tag = timeline.tag.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(
            MAGIC, VERSION, code, n, d, t,
            sched.beta, sched.gamma0, sched.gamma, sched.r_max,
            seed, len(tag),
        ))
        fh.write(tag)
        fh.write(np.asarray(timeline.times, "<i8").tobytes())
        fh.write(np.ascontiguousarray(z).astype(f"<f{8 if code == 0 else 4}").tobytes())


def load_timeline(path: Union[str, Path]) -> EmbeddingTimeline:
    """Read a timeline written by :func:`export_timeline`."""
    path = Path(path)
    if path.suffix == ".tsv":
        return _read_tsv(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, code, n, d, t, beta, gamma0, gamma, r_max, seed, taglen = (
            _HEADER.unpack(head)
        )
        if magic != MAGIC:
            raise ValueError(f"{path}: not a timeline file (bad magic {magic!r})")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        if code not in _DTYPES:
            raise ValueError(f"{path}: unknown dtype code {code}")
        tag = fh.read(taglen).decode("utf-8")
        times = np.frombuffer(fh.read(8 * t), "<i8")
        width = 8 if code == 0 else 4
        raw = fh.read(t * n * d * width)
        if len(raw) != t * n * d * width:
            raise ValueError(f"{path}: truncated matrix data")
        z = np.frombuffer(raw, f"<f{width}").astype(np.float64).reshape(t, n, d)
    schedule = FilterSchedule(gamma0=gamma0, gamma=gamma, beta=beta, r_max=r_max, tag=tag)
    return EmbeddingTimeline(
        times=[int(v) for v in times],
        matrices=[z[k] for k in range(t)],
        schedule=schedule,
        tag=tag,
        feature_seed=None if seed == -1 else int(seed),
    )


def _write_tsv(timeline: EmbeddingTimeline, path: Path) -> None:
    z = timeline.aligned()
    t, n, d = z.shape
    sched = timeline.schedule
    seed = "none" if timeline.feature_seed is None else str(timeline.feature_seed)
    with open(path, "w") as fh:
        fh.write(f"# format\tdynaprop-timeline/{VERSION}\n")
        fh.write(f"# n\t{n}\n# d\t{d}\n# checkpoints\t{t}\n")
        fh.write(f"# beta\t{sched.beta!r}\n# gamma0\t{sched.gamma0!r}\n")
        fh.write(f"# gamma\t{sched.gamma!r}\n# r_max\t{sched.r_max!r}\n")
        fh.write(f"# seed\t{seed}\n# tag\t{timeline.tag}\n")
        for k in range(t):
            fh.write(f"# checkpoint\t{timeline.times[k]}\n")
            for row in z[k]:
                fh.write("\t".join(repr(float(v)) for v in row) + "\n")


def _read_tsv(path: Path) -> EmbeddingTimeline:
    meta = {}
    times: List[int] = []
    matrices: List[List[List[float]]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("\t")
                if key == "checkpoint":
                    times.append(int(value))
                    matrices.append([])
                else:
                    meta[key] = value
            else:
                matrices[-1].append([float(v) for v in line.split("\t")])
    schedule = FilterSchedule(
        gamma0=float(meta["gamma0"]), gamma=float(meta["gamma"]),
        beta=float(meta["beta"]), r_max=float(meta["r_max"]),
        tag=meta.get("tag", "custom"),
    )
    seed: Optional[int] = None if meta.get("seed", "none") == "none" else int(meta["seed"])
    return EmbeddingTimeline(
        times=times,
        matrices=[np.asarray(m, np.float64) for m in matrices],
        schedule=schedule,
        tag=meta.get("tag", "custom"),
        feature_seed=seed,
    )
