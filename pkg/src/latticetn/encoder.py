"""Self-attention encoder over the flat lattice.

Attention scores combine four terms per head: content-content,
content-position, a global content bias and a global position bias, where
the position side reads the fused relative encoding of each token pair.
Each layer is a post-norm transformer block (attention, residual, layer
norm, feed-forward, residual, layer norm).
"""

from __future__ import annotations

import math

import torch
from torch import nn

from .errors import ConfigError, NumericError


class RelativeMultiHeadAttention(nn.Module):
    """Multi-head attention with pairwise relative position encodings.

    ``scaled`` divides raw scores by sqrt(d_head); disable it to get the
    literal four-term score.
    """

    def __init__(self, d_model: int, n_heads: int, scaled: bool = True, dropout: float = 0.0):
        super().__init__()
        if d_model % n_heads != 0:
            raise ConfigError(f"d_model {d_model} not divisible by n_heads {n_heads}")
        self.d_model = d_model
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.scaled = scaled
        self.w_q = nn.Linear(d_model, d_model, bias=False)
        self.w_ke = nn.Linear(d_model, d_model, bias=False)
        self.w_kr = nn.Linear(d_model, d_model, bias=False)
        self.w_v = nn.Linear(d_model, d_model, bias=False)
        self.w_o = nn.Linear(d_model, d_model, bias=False)
        self.u = nn.Parameter(torch.zeros(n_heads, self.d_head))
        self.v = nn.Parameter(torch.zeros(n_heads, self.d_head))
        self.drop = nn.Dropout(dropout)

    def attention_scores(self, emb: torch.Tensor, rel: torch.Tensor) -> torch.Tensor:
        """Pre-softmax score matrices, shape (n_heads, L', L').

        emb is (L', d_model) and rel (L', L', d_model). The content terms
        (query + u) . key and position terms (query + v) . rel_key are the
        grouped form of the four-term sum.
        """
        length = emb.shape[0]
        q = self.w_q(emb).view(length, self.n_heads, self.d_head)
        ke = self.w_ke(emb).view(length, self.n_heads, self.d_head)
        kr = self.w_kr(rel).view(length, length, self.n_heads, self.d_head)
        content = torch.einsum("ihd,jhd->hij", q + self.u, ke)
        position = torch.einsum("ihd,ijhd->hij", q + self.v, kr)
        scores = content + position
        if self.scaled:
            scores = scores / math.sqrt(self.d_head)
        return scores

    def forward(self, emb: torch.Tensor, rel: torch.Tensor) -> torch.Tensor:
        length = emb.shape[0]
        probs = torch.softmax(self.attention_scores(emb, rel), dim=-1)
        probs = self.drop(probs)
        values = self.w_v(emb).view(length, self.n_heads, self.d_head)
        context = torch.einsum("hij,jhd->ihd", probs, values).reshape(length, self.d_model)
        return self.w_o(context)


class EncoderLayer(nn.Module):
    def __init__(self, d_model: int, n_heads: int, d_ff: int, scaled: bool = True, dropout: float = 0.0):
        super().__init__()
        self.attn = RelativeMultiHeadAttention(d_model, n_heads, scaled=scaled, dropout=dropout)
        self.norm1 = nn.LayerNorm(d_model)
        self.ff1 = nn.Linear(d_model, d_ff)
        self.ff2 = nn.Linear(d_ff, d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.drop = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor, rel: torch.Tensor) -> torch.Tensor:
        x = self.norm1(x + self.drop(self.attn(x, rel)))
        x = self.norm2(x + self.drop(self.ff2(torch.relu(self.ff1(x)))))
        return x


class LatticeEncoder(nn.Module):
    """Stack of encoder layers sharing one relative encoding tensor."""

    def __init__(
        self,
        d_model: int,
        n_heads: int = 8,
        n_layers: int = 1,
        d_ff: int = 256,
        scaled: bool = True,
        dropout: float = 0.0,
    ):
        super().__init__()
        self.d_model = d_model
        self.layers = nn.ModuleList(
            EncoderLayer(d_model, n_heads, d_ff, scaled=scaled, dropout=dropout)
            for _ in range(n_layers)
        )

    def forward(self, emb: torch.Tensor, rel: torch.Tensor) -> torch.Tensor:
        x = emb
        for i, layer in enumerate(self.layers):
            x = layer(x, rel)
            if not torch.isfinite(x).all():
                raise NumericError(f"non-finite values after encoder layer {i}")
        return x
