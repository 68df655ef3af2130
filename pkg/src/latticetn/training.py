"""Training and evaluation loops.

One sentence per optimization step, Adam, fixed-seed shuffling; the model
snapshot with the best dev token accuracy wins. Runs are single-threaded so
that same-seed runs produce bit-identical metric logs.
"""

from __future__ import annotations

import copy
import random
import statistics
import time
from dataclasses import dataclass, field

import torch

from .config import Config
from .data import Corpus, evaluate, split, EvalReport
from .model import LatticeBuilder, TextNormModel


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    dev_token_accuracy: float

    def format(self) -> str:
        return (
            f"epoch {self.epoch} train_loss {self.train_loss:.6f} "
            f"dev_token_acc {self.dev_token_accuracy:.6f}"
        )


@dataclass
class TrainResult:
    model: TextNormModel
    history: list[EpochStats] = field(default_factory=list)
    best_dev_accuracy: float = 0.0


def predict_corpus(model: TextNormModel, builder: LatticeBuilder, corpus: Corpus) -> list[list[str]]:
    model.eval()
    return [model.predict(builder.build(text)) for text, _ in corpus]


def evaluate_corpus(model: TextNormModel, builder: LatticeBuilder, corpus: Corpus) -> EvalReport:
    return evaluate(predict_corpus(model, builder, corpus), [labels for _, labels in corpus])


def train_model(
    model: TextNormModel,
    builder: LatticeBuilder,
    train_corpus: Corpus,
    dev_corpus: Corpus,
    config: Config,
    log=None,
) -> TrainResult:
    torch.set_num_threads(1)
    torch.manual_seed(config.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    # lattices are static per sentence; match lexicon and rules once
    train_items = [
        (builder.build(text), labels) for text, labels in train_corpus
    ]
    result = TrainResult(model=model)
    best_state = copy.deepcopy(model.state_dict())
    best_acc = -1.0
    order = list(range(len(train_items)))
    for epoch in range(1, config.epochs + 1):
        model.train()
        random.Random(config.seed * 1000 + epoch).shuffle(order)
        total_loss = 0.0
        for idx in order:
            lattice, gold = train_items[idx]
            optimizer.zero_grad()
            loss = model.loss(lattice, gold)
            loss.backward()
            optimizer.step()
            total_loss += float(loss.detach())
        dev_report = evaluate_corpus(model, builder, dev_corpus)
        stats = EpochStats(
            epoch=epoch,
            train_loss=total_loss / max(len(train_items), 1),
            dev_token_accuracy=dev_report.token_accuracy,
        )
        result.history.append(stats)
        if log is not None:
            log(stats.format())
        if dev_report.token_accuracy > best_acc:
            best_acc = dev_report.token_accuracy
            best_state = copy.deepcopy(model.state_dict())
    if config.epochs > 0:
        model.load_state_dict(best_state)
    result.best_dev_accuracy = max(best_acc, 0.0)
    model.eval()
    return result


@dataclass
class AblationRow:
    name: str
    use_lexicon: bool
    use_rules: bool
    accuracies: list[float] = field(default_factory=list)
    macro_f1s: list[float] = field(default_factory=list)

    @property
    def median_accuracy(self) -> float:
        return statistics.median(self.accuracies)

    @property
    def median_f1(self) -> float:
        return statistics.median(self.macro_f1s)


ABLATION_VARIANTS = (
    ("full", True, True),
    ("-lexicon", False, True),
    ("-rules", True, False),
    ("-both", False, False),
)


def run_ablation(
    corpus: Corpus,
    config: Config,
    builder: LatticeBuilder,
    seeds,
    log=None,
) -> list[AblationRow]:
    """Train and test the four input-channel variants on every seed.

    The architecture is shared; variants only empty the lexicon or rule
    channel when the lattice is built.
    """
    rows = [AblationRow(name, lex, rules) for name, lex, rules in ABLATION_VARIANTS]
    for seed in seeds:
        run_config = Config.from_dict({**config.to_dict(), "seed": seed})
        train_c, dev_c, test_c = split(corpus, seed=seed)
        for row in rows:
            variant_builder = LatticeBuilder(
                lexicon=builder.lexicon,
                rules=builder.rules,
                use_lexicon=row.use_lexicon,
                use_rules=row.use_rules,
            )
            model = TextNormModel(run_config, train_c.characters())
            started = time.time()
            train_model(model, variant_builder, train_c, dev_c, run_config)
            report = evaluate_corpus(model, variant_builder, test_c)
            row.accuracies.append(report.token_accuracy)
            row.macro_f1s.append(report.macro_f1)
            if log is not None:
                log(
                    f"seed {seed} variant {row.name:<9} "
                    f"test_token_acc {report.token_accuracy:.6f} "
                    f"macro_f1 {report.macro_f1:.6f} "
                    f"({time.time() - started:.1f}s)"
                )
    return rows
