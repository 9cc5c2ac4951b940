"""Sequence encoders over per-node delta histories, link scorer, node classifier.

The encoder consumes each node's delta sequence and exposes one hidden state
per history prefix; h at index k summarizes deltas 1..k, with h[0] = 0 (no
history). Predicting the graph at checkpoint k therefore reads h[k-1]. The
link scorer is an MLP over the ordered concatenation [h_i || h_j] with a
sigmoid output; the node classifier is an MLP over the latest embedding row.
"""

from __future__ import annotations

import torch
from torch import nn

from .config import SequenceModelConfig


class _CausalTransformer(nn.Module):
    """Whole-sequence encoder; the causal mask keeps prefixes self-contained."""

    def __init__(self, input_dim: int, config: SequenceModelConfig):
        super().__init__()
        self.proj = nn.Linear(input_dim, config.hidden)
        layer = nn.TransformerEncoderLayer(
            d_model=config.hidden,
            nhead=config.heads,
            dim_feedforward=2 * config.hidden,
            dropout=config.dropout,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=config.layers)
        self.hidden = config.hidden

    def forward(self, deltas: torch.Tensor) -> torch.Tensor:
        seq = deltas.shape[1]
        pos = torch.arange(seq, dtype=deltas.dtype, device=deltas.device)
        angles = pos[:, None] / torch.pow(
            10000.0, torch.arange(0, self.hidden, 2, dtype=deltas.dtype) / self.hidden
        )
        enc = torch.zeros(seq, self.hidden, dtype=deltas.dtype)
        enc[:, 0::2] = torch.sin(angles)
        enc[:, 1::2] = torch.cos(angles[:, : self.hidden // 2])
        mask = nn.Transformer.generate_square_subsequent_mask(seq)
        return self.encoder(self.proj(deltas) + enc, mask=mask)


class SequenceEncoder(nn.Module):
    def __init__(self, input_dim: int, config: SequenceModelConfig):
        super().__init__()
        self.kind = config.cell
        dropout = config.dropout if config.layers > 1 else 0.0
        if config.cell == "lstm":
            self.core = nn.LSTM(input_dim, config.hidden, config.layers,
                                batch_first=True, dropout=dropout)
        elif config.cell == "gru":
            self.core = nn.GRU(input_dim, config.hidden, config.layers,
                               batch_first=True, dropout=dropout)
        else:
            self.core = _CausalTransformer(input_dim, config)

    def forward(self, deltas: torch.Tensor) -> torch.Tensor:
        """(nodes, T, d) deltas -> (nodes, T+1, hidden) prefix states, h[0] = 0."""
        if self.kind in ("lstm", "gru"):
            states, _ = self.core(deltas)
        else:
            states = self.core(deltas)
        zero = torch.zeros(states.shape[0], 1, states.shape[2], dtype=states.dtype)
        return torch.cat([zero, states], dim=1)


class LinkScorer(nn.Module):
    def __init__(self, hidden: int, dropout: float):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(2 * hidden, hidden),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(hidden, 1),
        )

    def forward(self, h_i: torch.Tensor, h_j: torch.Tensor) -> torch.Tensor:
        return self.net(torch.cat([h_i, h_j], dim=-1)).squeeze(-1)


class LinkPredictionModel(nn.Module):
    def __init__(self, input_dim: int, config: SequenceModelConfig):
        super().__init__()
        self.encoder = SequenceEncoder(input_dim, config)
        self.scorer = LinkScorer(config.hidden, config.dropout)

    def prefix_states(self, deltas: torch.Tensor) -> torch.Tensor:
        return self.encoder(deltas)

    def pair_logits(self, states, i_idx, j_idx, k_idx) -> torch.Tensor:
        """Logit for edge (i, j) at checkpoint k, reading states at k-1."""
        h_i = states[i_idx, k_idx - 1]
        h_j = states[j_idx, k_idx - 1]
        return self.scorer(h_i, h_j)


def mlp_classifier(input_dim: int, n_classes: int, config: SequenceModelConfig) -> nn.Module:
    """MLP of the configured depth (hidden layers with ReLU, linear head)."""
    layers = []
    width = input_dim
    for _ in range(config.mlp_layers - 1):
        layers.extend([nn.Linear(width, config.hidden), nn.ReLU(), nn.Dropout(config.dropout)])
        width = config.hidden
    layers.append(nn.Linear(width, n_classes))
    return nn.Sequential(*layers)
