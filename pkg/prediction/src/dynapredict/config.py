"""Sequence-model configuration, loadable from a TOML file."""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CELLS = ("lstm", "gru", "transformer")


@dataclass
class SequenceModelConfig:
    cell: str = "lstm"
    layers: int = 1
    hidden: int = 64
    dropout: float = 0.1
    learning_rate: float = 0.01
    batch_size: int = 256
    epochs: int = 50
    heads: int = 4
    mlp_layers: int = 3
    seed: int = 0
    negatives_eval: int = 1000

    def __post_init__(self):
        if self.cell not in CELLS:
            raise ValueError(f"cell must be one of {CELLS}, got {self.cell!r}")
        if min(self.layers, self.hidden, self.batch_size, self.epochs, self.heads) < 1:
            raise ValueError("layers, hidden, batch_size, epochs and heads must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.learning_rate <= 0.0:
            raise ValueError("learning rate must be positive")
        if self.mlp_layers < 1:
            raise ValueError("classifier depth must be positive")
        if self.hidden % self.heads != 0 and self.cell == "transformer":
            raise ValueError("hidden size must be divisible by the head count")


def load_config(path: Union[str, Path]) -> SequenceModelConfig:
    """Read the `[model]` table of a TOML file; missing keys keep defaults."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    table = data.get("model", data)
    known = {f.name for f in fields(SequenceModelConfig)}
    unknown = set(table) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return SequenceModelConfig(**table)
