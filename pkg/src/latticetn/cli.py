"""Command-line interface.

Subcommands: train, eval, normalize, lattice, ablate. Exit codes: 0 on
success, 1 for usage or configuration errors, 2 for data errors, 3 for
numeric failures.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from .config import Config, load_config
from .data import load_corpus, split, synthesize_corpus
from .errors import ConfigError, DataError, NumericError
from .lattice import Lexicon, TokenKind
from .model import (
    LatticeBuilder,
    TextNormModel,
    load_checkpoint,
    normalize_line,
    save_checkpoint,
)
from .rel_pos import relative_distances
from .rules import load_rules
from .training import evaluate_corpus, run_ablation, train_model
from .verbalize import Verbalizer, asset_path


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors map to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _str2bool(value: str) -> bool:
    if value.lower() in ("true", "1", "yes", "on"):
        return True
    if value.lower() in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {value!r}")


_FIELD_TYPES = {"int": int, "float": float, "bool": _str2bool, "str": str}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    for f in fields(Config):
        flag = "--" + f.name.replace("_", "-")
        parser.add_argument(flag, dest=f.name, type=_FIELD_TYPES[f.type], default=None)


def _merge_config(args) -> Config:
    config = load_config(args.config) if args.config else Config()
    for f in fields(Config):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(config, f.name, value)
    return config


def _resolve_assets(config: Config) -> Config:
    """Fill empty asset paths with the bundled defaults."""
    defaults = {
        "lexicon": "lexicon.txt",
        "rules": "default.rules",
        "symbols": "symbols.tsv",
        "units": "units.tsv",
        "abbr": "abbr.tsv",
    }
    for name, asset in defaults.items():
        if not getattr(config, name):
            setattr(config, name, str(asset_path(asset)))
    return config


def _make_builder(config: Config) -> LatticeBuilder:
    return LatticeBuilder(
        lexicon=Lexicon.from_file(config.lexicon),
        rules=load_rules(config.rules),
        use_lexicon=config.use_lexicon,
        use_rules=config.use_rules,
    )


def _make_verbalizer(config: Config) -> Verbalizer:
    return Verbalizer.from_files(config.symbols, config.units, config.abbr)


def _load_data(config: Config, synthetic: int, label_set=None):
    if synthetic > 0:
        return synthesize_corpus(synthetic, seed=config.seed)
    if not config.corpus:
        raise ConfigError("no corpus: pass --corpus PATH or --synthetic N")
    return load_corpus(config.corpus, label_set)


def cmd_train(args) -> int:
    config = _resolve_assets(_merge_config(args))
    config.validate()
    corpus = _load_data(config, args.synthetic)
    if len(corpus) == 0:
        raise DataError("corpus is empty")
    train_c, dev_c, _ = split(corpus, seed=config.seed)
    builder = _make_builder(config)
    model = TextNormModel(config, train_c.characters())
    train_model(model, builder, train_c, dev_c, config, log=print)
    save_checkpoint(config.checkpoint, model)
    print(f"saved checkpoint to {config.checkpoint}")
    return 0


def cmd_eval(args) -> int:
    config = _resolve_assets(_merge_config(args))
    config.validate()
    model = load_checkpoint(config.checkpoint)
    try:
        corpus = _load_data(config, args.synthetic, model.label_set)
    except DataError as exc:
        raise DataError(f"corpus incompatible with checkpoint: {exc}") from exc
    if args.split == "all":
        part = corpus
    else:
        parts = dict(zip(("train", "dev", "test"), split(corpus, seed=config.seed)))
        part = parts[args.split]
    if len(part) == 0:
        raise DataError(f"{args.split} split is empty")
    builder = _make_builder(config)
    report = evaluate_corpus(model, builder, part)
    print(report.to_json() if args.json else report.to_text())
    return 0


def cmd_normalize(args) -> int:
    config = _resolve_assets(_merge_config(args))
    config.validate()
    model = load_checkpoint(config.checkpoint)
    builder = _make_builder(config)
    verbalizer = _make_verbalizer(config)
    stream = sys.stdin if args.input == "-" else open(args.input, encoding="utf-8")
    try:
        for raw in stream:
            line = raw.rstrip("\n")
            result = normalize_line(line, model, builder, verbalizer)
            for warning in result.warnings:
                print(f"warning: {warning}", file=sys.stderr)
            print(result.text)
    finally:
        if stream is not sys.stdin:
            stream.close()
    return 0


def _format_matrix(name: str, matrix) -> str:
    rows = ["  ".join(f"{int(v):>4d}" for v in row) for row in matrix.tolist()]
    return f"{name}:\n" + "\n".join("  " + r for r in rows)


def cmd_lattice(args) -> int:
    config = _resolve_assets(_merge_config(args))
    config.validate()
    builder = _make_builder(config)
    lattice = builder.build(args.sentence)
    print(f"sentence: {lattice.sentence}  (L={lattice.char_count}, L'={len(lattice)})")
    print(f"{'idx':<5}{'kind':<6}{'head':<6}{'tail':<6}{'text':<12}rule")
    for i, tok in enumerate(lattice.tokens):
        kind = {TokenKind.CHAR: "char", TokenKind.WORD: "word", TokenKind.NSW: "nsw"}[tok.kind]
        print(f"{i:<5}{kind:<6}{tok.head:<6}{tok.tail:<6}{tok.text:<12}{tok.rule or ''}")
    if args.distances:
        dist = relative_distances(lattice)
        for name, matrix in (("hh", dist.hh), ("ht", dist.ht), ("th", dist.th), ("tt", dist.tt)):
            print(_format_matrix(name, matrix))
    return 0


def cmd_ablate(args) -> int:
    config = _resolve_assets(_merge_config(args))
    config.validate()
    corpus = _load_data(config, args.synthetic)
    if len(corpus) == 0:
        raise DataError("corpus is empty")
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [
        config.seed + i for i in range(3)
    ]
    print(f"seeds: {', '.join(str(s) for s in seeds)}")
    builder = _make_builder(config)
    rows = run_ablation(corpus, config, builder, seeds, log=print)
    print(f"{'variant':<12}{'median_acc':>12}{'median_f1':>12}")
    for row in rows:
        print(f"{row.name:<12}{row.median_accuracy:>12.6f}{row.median_f1:>12.6f}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="latticetn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", parents=[], help="train a model and save a checkpoint")
    _add_config_flags(p_train)
    p_train.add_argument("--synthetic", type=int, default=0, help="generate N synthetic sentences")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on a corpus split")
    _add_config_flags(p_eval)
    p_eval.add_argument("--synthetic", type=int, default=0)
    p_eval.add_argument("--split", choices=("train", "dev", "test", "all"), default="test")
    p_eval.add_argument("--json", action="store_true", help="machine-readable report")
    p_eval.set_defaults(func=cmd_eval)

    p_norm = sub.add_parser("normalize", help="spoken-form text for each input line")
    _add_config_flags(p_norm)
    p_norm.add_argument("--input", default="-", help="input file, '-' for stdin")
    p_norm.set_defaults(func=cmd_normalize)

    p_lat = sub.add_parser("lattice", help="dump the lattice built for a sentence")
    _add_config_flags(p_lat)
    p_lat.add_argument("sentence")
    p_lat.add_argument("--distances", action="store_true", help="print the four distance matrices")
    p_lat.set_defaults(func=cmd_lattice)

    p_abl = sub.add_parser("ablate", help="compare full, -lexicon, -rules and -both variants")
    _add_config_flags(p_abl)
    p_abl.add_argument("--synthetic", type=int, default=0)
    p_abl.add_argument("--seeds", help="comma-separated seed list (default: seed, seed+1, seed+2)")
    p_abl.set_defaults(func=cmd_ablate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
