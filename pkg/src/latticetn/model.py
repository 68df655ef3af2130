"""Full tagging model: lattice building, embeddings, encoder, CRF head.

Checkpoints are .npz containers: every parameter tensor is stored as a
named little-endian float32 array with its shape in the array header, plus
a ``__meta__`` JSON blob (version, hyperparameters, character vocabulary
and label inventory).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .config import Config
from .crf import CrfTagger
from .embeddings import EmbeddingTable, embed_lattice
from .encoder import LatticeEncoder, RelativeMultiHeadAttention
from .errors import CheckpointError, UnmappedSymbolError
from .labels import LabelSet
from .lattice import FlatLattice, Lexicon, build_lattice, match_lexicon
from .rel_pos import RelativePositionFusion, relative_distances
from .rules import RuleSet, match_rules
from .verbalize import Verbalizer, spans_from_labels

CHECKPOINT_VERSION = 1


@dataclass
class LatticeBuilder:
    """Sentence -> flat lattice, with switchable word/NSW channels.

    Emptying a channel (use_lexicon / use_rules False) is how ablation
    variants are realized; the model architecture never changes.
    """

    lexicon: Lexicon | None = None
    rules: RuleSet | None = None
    use_lexicon: bool = True
    use_rules: bool = True

    def build(self, sentence: str) -> FlatLattice:
        words = ()
        nsws = ()
        if self.use_lexicon and self.lexicon is not None:
            words = match_lexicon(sentence, self.lexicon)
        if self.use_rules and self.rules is not None:
            nsws = match_rules(sentence, self.rules)
        return build_lattice(sentence, words, nsws)


class TextNormModel(nn.Module):
    """Lattice tagger: embeddings + relative-position encoder + CRF."""

    def __init__(self, config: Config, chars, label_set: LabelSet | None = None):
        super().__init__()
        self.config = config
        self.label_set = label_set or LabelSet.default()
        self.table = EmbeddingTable(chars, config.d_model, seed=config.seed)
        self.fusion = RelativePositionFusion(config.d_model)
        self.encoder = LatticeEncoder(
            config.d_model,
            n_heads=config.n_heads,
            n_layers=config.n_layers,
            d_ff=config.d_ff,
            scaled=config.scale_attention,
            dropout=config.dropout,
        )
        self.tagger = CrfTagger(config.d_model, self.label_set)
        self.reset_parameters(config.seed)

    def reset_parameters(self, seed: int) -> None:
        """Deterministic init: linear weights normal(0, 0.02), biases zero,
        layer norms identity, embedding rows uniform in [-0.1, 0.1]."""
        torch.manual_seed(seed)
        with torch.no_grad():
            self.table.vectors.uniform_(-0.1, 0.1)
            for module in (self.fusion, self.encoder, self.tagger):
                for m in module.modules():
                    if isinstance(m, nn.Linear):
                        m.weight.normal_(0.0, 0.02)
                        if m.bias is not None:
                            m.bias.zero_()
                    elif isinstance(m, nn.LayerNorm):
                        m.weight.fill_(1.0)
                        m.bias.zero_()
            for attn in self.encoder.modules():
                if isinstance(attn, RelativeMultiHeadAttention):
                    attn.u.normal_(0.0, 0.02)
                    attn.v.normal_(0.0, 0.02)
            self.tagger.crf.transitions.zero_()
            self.tagger.crf.start_transitions.zero_()
            self.tagger.crf.end_transitions.zero_()

    def encode(self, lattice: FlatLattice) -> torch.Tensor:
        emb = embed_lattice(lattice, self.table, pooling=self.config.pooling)
        rel = self.fusion(relative_distances(lattice))
        return self.encoder(emb, rel)

    def emissions(self, lattice: FlatLattice) -> torch.Tensor:
        return self.tagger.emissions(self.encode(lattice), lattice)

    def loss(self, lattice: FlatLattice, gold: list[str]) -> torch.Tensor:
        return self.tagger.nll(self.emissions(lattice), gold)

    def predict(self, lattice: FlatLattice) -> list[str]:
        with torch.no_grad():
            return self.tagger.decode(self.emissions(lattice))


def save_checkpoint(path, model: TextNormModel) -> None:
    vocab_chars = [None] * len(model.table.char_vocab)
    for ch, idx in model.table.char_vocab.items():
        vocab_chars[idx] = ch
    meta = {
        "version": CHECKPOINT_VERSION,
        "format": "npz; parameter arrays little-endian float32 ('<f4')",
        "config": model.config.to_dict(),
        "chars": vocab_chars[1:],  # index order; row 0 is the <unk> slot
        "labels": list(model.label_set.labels),
    }
    arrays = {
        name: tensor.detach().cpu().numpy().astype("<f4")
        for name, tensor in model.state_dict().items()
    }
    meta_bytes = np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8)
    np.savez(path, __meta__=meta_bytes, **arrays)


def load_checkpoint(path) -> TextNormModel:
    try:
        data = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if "__meta__" not in data:
        raise CheckpointError(f"checkpoint {path} has no __meta__ entry")
    meta = json.loads(bytes(data["__meta__"]).decode("utf-8"))
    if meta.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"checkpoint version {meta.get('version')} unsupported (expected {CHECKPOINT_VERSION})"
        )
    config = Config.from_dict(meta["config"])
    label_set = LabelSet(labels=tuple(meta["labels"]))
    model = TextNormModel(config, meta["chars"], label_set)
    state = {}
    for name, tensor in model.state_dict().items():
        if name not in data:
            raise CheckpointError(f"checkpoint missing tensor {name!r}")
        arr = data[name]
        if tuple(arr.shape) != tuple(tensor.shape):
            raise CheckpointError(
                f"tensor {name!r} has shape {tuple(arr.shape)}, expected {tuple(tensor.shape)}"
            )
        state[name] = torch.from_numpy(arr.astype(np.float32))
    model.load_state_dict(state)
    return model


@dataclass
class NormalizeResult:
    text: str
    warnings: list[str] = field(default_factory=list)


def normalize_line(
    line: str,
    model: TextNormModel,
    builder: LatticeBuilder,
    verbalizer: Verbalizer,
) -> NormalizeResult:
    """Run the full pipeline on one line of text.

    Spans whose symbols have no reading are left as written; each such span
    produces a warning instead of failing the line.
    """
    if not line:
        return NormalizeResult(text="")
    lattice = builder.build(line)
    labels = model.predict(lattice)
    spans = spans_from_labels(line, labels)
    kept = []
    warnings = []
    pieces = {}
    for span in spans:
        try:
            pieces[(span.head, span.tail)] = verbalizer.verbalize(span)
            kept.append(span)
        except UnmappedSymbolError as exc:
            warnings.append(str(exc))
            pieces[(span.head, span.tail)] = span.text
            kept.append(span)
    out = []
    cursor = 0
    for span in kept:
        out.append(line[cursor : span.head])
        out.append(pieces[(span.head, span.tail)])
        cursor = span.tail + 1
    out.append(line[cursor:])
    return NormalizeResult(text="".join(out), warnings=warnings)


__all__ = [
    "LatticeBuilder",
    "TextNormModel",
    "save_checkpoint",
    "load_checkpoint",
    "normalize_line",
    "NormalizeResult",
]
