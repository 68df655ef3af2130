#!/usr/bin/env python3
"""Train on a synthetic corpus and normalize a few demo lines.

Usage: python scripts/train_synthetic.py [--size 2000] [--epochs 5] [--seed 7]
"""

import argparse
import time

from latticetn import (
    Config,
    Lexicon,
    TextNormModel,
    load_rules,
    normalize_line,
    save_checkpoint,
    split,
    synthesize_corpus,
)
from latticetn.model import LatticeBuilder
from latticetn.training import evaluate_corpus, train_model
from latticetn.verbalize import Verbalizer, asset_path

DEMO_LINES = [
    "今天气温-20℃，请注意保暖。",
    "快拨911报警！",
    "会议上午9:10开始",
    "最终比分3-2",
    "进度完成了3/4",
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=2000)
    parser.add_argument("--epochs", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--checkpoint", default="synthetic_model.npz")
    args = parser.parse_args()

    config = Config(seed=args.seed, epochs=args.epochs, checkpoint=args.checkpoint)
    corpus = synthesize_corpus(args.size, seed=args.seed)
    train_c, dev_c, test_c = split(corpus, seed=args.seed)
    builder = LatticeBuilder(
        lexicon=Lexicon.from_file(asset_path("lexicon.txt")),
        rules=load_rules(asset_path("default.rules")),
    )
    model = TextNormModel(config, train_c.characters())

    started = time.time()
    train_model(model, builder, train_c, dev_c, config, log=print)
    print(f"trained in {time.time() - started:.0f}s")

    report = evaluate_corpus(model, builder, test_c)
    print(report.to_text())
    save_checkpoint(args.checkpoint, model)
    print(f"saved checkpoint to {args.checkpoint}")

    verbalizer = Verbalizer.default()
    for line in DEMO_LINES:
        result = normalize_line(line, model, builder, verbalizer)
        print(f"{line}  ->  {result.text}")


if __name__ == "__main__":
    main()
