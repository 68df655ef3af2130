"""Relative position encoding between lattice tokens.

Every token pair (i, j) yields four signed head/tail distances; each is
mapped through a sinusoidal basis and the four encodings are concatenated
(order: head-head, tail-head, head-tail, tail-tail) and fused by a learned
linear map followed by ReLU.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn

from .errors import DataError
from .lattice import FlatLattice


@dataclass(frozen=True)
class RelativeDistances:
    """Four signed L'xL' integer matrices of pairwise head/tail offsets."""

    hh: torch.Tensor
    ht: torch.Tensor
    th: torch.Tensor
    tt: torch.Tensor


def relative_distances(lattice: FlatLattice) -> RelativeDistances:
    """hh[i,j] = head_i - head_j, ht[i,j] = head_i - tail_j, and so on."""
    if len(lattice) == 0:
        raise DataError("cannot compute distances of an empty lattice")
    heads = torch.tensor(lattice.heads(), dtype=torch.long)
    tails = torch.tensor(lattice.tails(), dtype=torch.long)
    return RelativeDistances(
        hh=heads.unsqueeze(1) - heads.unsqueeze(0),
        ht=heads.unsqueeze(1) - tails.unsqueeze(0),
        th=tails.unsqueeze(1) - heads.unsqueeze(0),
        tt=tails.unsqueeze(1) - tails.unsqueeze(0),
    )


def sinusoidal_encode(distances: torch.Tensor, d_model: int, dtype=torch.float32) -> torch.Tensor:
    """Sinusoidal vectors for a tensor of signed integer distances.

    Output shape is distances.shape + (d_model,), with component 2k equal to
    sin(d / 10000^(2k/d_model)) and component 2k+1 the matching cosine.
    Negative distances are substituted directly (no clipping).
    """
    if d_model <= 0 or d_model % 2 != 0:
        raise DataError(f"sinusoidal encoding needs a positive even d_model, got {d_model}")
    d = distances.to(dtype).unsqueeze(-1)
    k2 = torch.arange(0, d_model, 2, dtype=dtype)
    angles = d / torch.pow(torch.tensor(10000.0, dtype=dtype), k2 / d_model)
    out = torch.empty(*distances.shape, d_model, dtype=dtype)
    out[..., 0::2] = torch.sin(angles)
    out[..., 1::2] = torch.cos(angles)
    return out


def sinusoidal(d: int, d_model: int) -> torch.Tensor:
    """Encoding of a single signed distance, as a d_model vector."""
    return sinusoidal_encode(torch.tensor(d), d_model, dtype=torch.float64)


class RelativePositionFusion(nn.Module):
    """Fuse the four distance encodings into one vector per token pair.

    The learned weight has shape (d_model, 4*d_model); the output is
    elementwise non-negative by construction.
    """

    def __init__(self, d_model: int):
        super().__init__()
        self.d_model = d_model
        self.proj = nn.Linear(4 * d_model, d_model, bias=False)

    def forward(self, dist: RelativeDistances) -> torch.Tensor:
        dtype = self.proj.weight.dtype
        basis = torch.cat(
            [
                sinusoidal_encode(dist.hh, self.d_model, dtype),
                sinusoidal_encode(dist.th, self.d_model, dtype),
                sinusoidal_encode(dist.ht, self.d_model, dtype),
                sinusoidal_encode(dist.tt, self.d_model, dtype),
            ],
            dim=-1,
        )
        return torch.relu(self.proj(basis))


def fuse(dist: RelativeDistances, fusion: RelativePositionFusion) -> torch.Tensor:
    """Relative encoding tensor of shape (L', L', d_model)."""
    return fusion(dist)
