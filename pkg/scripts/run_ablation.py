#!/usr/bin/env python3
"""Compare the full model against -lexicon / -rules / -both input variants.

Usage: python scripts/run_ablation.py [--size 800] [--epochs 4] [--seeds 7,8,9]
"""

import argparse

from latticetn import Config, Lexicon, load_rules, synthesize_corpus
from latticetn.model import LatticeBuilder
from latticetn.training import run_ablation
from latticetn.verbalize import asset_path


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=800)
    parser.add_argument("--epochs", type=int, default=4)
    parser.add_argument("--seeds", default="7,8,9")
    args = parser.parse_args()

    seeds = [int(s) for s in args.seeds.split(",")]
    config = Config(epochs=args.epochs, seed=seeds[0])
    corpus = synthesize_corpus(args.size, seed=seeds[0])
    builder = LatticeBuilder(
        lexicon=Lexicon.from_file(asset_path("lexicon.txt")),
        rules=load_rules(asset_path("default.rules")),
    )
    print(f"corpus {args.size} sentences, epochs {args.epochs}, seeds {seeds}")
    rows = run_ablation(corpus, config, builder, seeds, log=print)
    print(f"\n{'variant':<12}{'median_acc':>12}{'median_f1':>12}")
    for row in rows:
        print(f"{row.name:<12}{row.median_accuracy:>12.6f}{row.median_f1:>12.6f}")


if __name__ == "__main__":
    main()
