"""Token embeddings for the lattice.

Character tokens look up a trainable table; multi-character span tokens
pool their constituent character vectors (mean by default, max as a config
switch). The table stands in for a pretrained contextual encoder and can be
seeded from a plain-text vector file instead.
"""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn

from .errors import DataError
from .lattice import FlatLattice

UNK = "<unk>"


class EmbeddingTable(nn.Module):
    """Character -> vector lookup with an explicit out-of-vocabulary row."""

    def __init__(self, chars, d_model: int, seed: int = 0):
        super().__init__()
        vocab = {UNK: 0}
        for ch in chars:
            if ch not in vocab:
                vocab[ch] = len(vocab)
        self.char_vocab = vocab
        self.unk_index = 0
        self.d_model = d_model
        gen = torch.Generator().manual_seed(seed)
        weight = torch.empty(len(vocab), d_model).uniform_(-0.1, 0.1, generator=gen)
        self.vectors = nn.Parameter(weight)

    def __len__(self) -> int:
        return len(self.char_vocab)

    def index(self, ch: str) -> int:
        return self.char_vocab.get(ch, self.unk_index)

    def indices(self, text: str) -> list[int]:
        return [self.index(ch) for ch in text]

    @classmethod
    def from_vector_file(cls, path: str | Path) -> "EmbeddingTable":
        """Load precomputed vectors: ``char<TAB>v1 v2 ... v_dmodel`` per line."""
        rows = []
        chars = []
        for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            ch, _, values = line.partition("\t")
            try:
                vec = [float(v) for v in values.split()]
            except ValueError:
                raise DataError(f"line {line_no}: bad vector for {ch!r}") from None
            if rows and len(vec) != len(rows[0]):
                raise DataError(f"line {line_no}: dimension mismatch for {ch!r}")
            chars.append(ch)
            rows.append(vec)
        if not rows:
            raise DataError(f"no vectors in {path}")
        table = cls(chars, d_model=len(rows[0]))
        with torch.no_grad():
            for ch, vec in zip(chars, rows):
                table.vectors[table.char_vocab[ch]] = torch.tensor(vec)
        return table


def embed_lattice(lattice: FlatLattice, table: EmbeddingTable, pooling: str = "mean") -> torch.Tensor:
    """Token matrix of shape (len(lattice), d_model).

    Character tokens are direct table rows; span tokens pool the vectors of
    the characters they cover.
    """
    if len(lattice) == 0:
        raise DataError("cannot embed an empty lattice")
    if pooling not in ("mean", "max"):
        raise DataError(f"unknown pooling mode {pooling!r}")
    char_idx = torch.tensor(table.indices(lattice.sentence), dtype=torch.long)
    char_vecs = table.vectors[char_idx]  # (L, d_model)
    rows = [char_vecs]
    for tok in lattice.span_tokens:
        window = char_vecs[tok.head : tok.tail + 1]
        pooled = window.mean(dim=0) if pooling == "mean" else window.max(dim=0).values
        rows.append(pooled.unsqueeze(0))
    return torch.cat(rows, dim=0)
