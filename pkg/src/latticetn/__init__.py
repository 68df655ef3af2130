"""Chinese text normalization over a flat token lattice.

Pipeline: lexicon words and rule-matched NSW candidates join the character
sequence in a flat lattice; a self-attention encoder with relative position
encodings contextualizes every token; a linear+CRF head tags characters
with BMESO x category labels; tagged spans verbalize to spoken-form words.
"""

from .config import Config, load_config
from .data import Corpus, evaluate, load_corpus, save_corpus, split, synthesize_corpus
from .labels import CATEGORIES, LabelSet
from .lattice import FlatLattice, Lexicon, Token, TokenKind, build_lattice, match_lexicon
from .model import LatticeBuilder, TextNormModel, load_checkpoint, normalize_line, save_checkpoint
from .rules import RuleSet, compile_rules, load_rules, match_rules
from .training import evaluate_corpus, run_ablation, train_model
from .verbalize import (
    TaggedSpan,
    Verbalizer,
    normalize_sentence,
    read_cardinal,
    read_digits,
    spans_from_labels,
)

__version__ = "0.1.0"

__all__ = [
    "CATEGORIES",
    "Config",
    "Corpus",
    "FlatLattice",
    "LabelSet",
    "LatticeBuilder",
    "Lexicon",
    "RuleSet",
    "TaggedSpan",
    "TextNormModel",
    "Token",
    "TokenKind",
    "Verbalizer",
    "build_lattice",
    "compile_rules",
    "evaluate",
    "evaluate_corpus",
    "load_checkpoint",
    "load_config",
    "load_corpus",
    "load_rules",
    "match_lexicon",
    "match_rules",
    "normalize_line",
    "normalize_sentence",
    "read_cardinal",
    "read_digits",
    "run_ablation",
    "save_checkpoint",
    "save_corpus",
    "spans_from_labels",
    "split",
    "synthesize_corpus",
    "train_model",
]
