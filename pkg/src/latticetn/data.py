"""Corpora, synthetic data generation, splits, and evaluation metrics.

Corpus files are column text: one ``character<TAB>label`` line per
character, a blank line between sentences, UTF-8. Span-level scoring treats
a predicted span as correct only when head, tail and category all match.
"""

from __future__ import annotations

import json
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusFormatError, DataError, LabelError
from .labels import LabelSet, spans_to_labels, split_label

# ---------------------------------------------------------------------------
# corpus container and file format


@dataclass
class Corpus:
    sentences: list[tuple[str, list[str]]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, idx):
        return self.sentences[idx]

    def subset(self, indices) -> "Corpus":
        return Corpus([self.sentences[i] for i in indices])

    def characters(self):
        """Every character occurring in the corpus, in first-seen order."""
        seen = {}
        for text, _ in self.sentences:
            for ch in text:
                seen.setdefault(ch, None)
        return list(seen)


def load_corpus(path: str | Path, label_set: LabelSet | None = None) -> Corpus:
    """Parse and validate a corpus file, reporting the line number of the
    first violation (bad columns, unknown label, ill-formed BMESO run)."""
    label_set = label_set or LabelSet.default()
    sentences = []
    chars: list[str] = []
    labels: list[str] = []
    open_cat: str | None = None
    last_line = 0

    def flush(line_no: int) -> None:
        nonlocal open_cat
        if open_cat is not None:
            raise CorpusFormatError(f"sentence ends inside an open {open_cat} span", line_no)
        if chars:
            sentences.append(("".join(chars), labels.copy()))
            chars.clear()
            labels.clear()

    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush(last_line or line_no)
            continue
        if "\t" not in line:
            raise CorpusFormatError(f"expected char<TAB>label, got {line!r}", line_no)
        ch, _, label = line.partition("\t")
        if len(ch) != 1:
            raise CorpusFormatError(f"first column must be one character, got {ch!r}", line_no)
        if label not in label_set:
            raise CorpusFormatError(f"unknown label {label!r}", line_no)
        prefix, cat = split_label(label)
        if open_cat is None:
            if prefix in ("M", "E"):
                raise CorpusFormatError(f"{label} without a preceding B-{cat}", line_no)
            if prefix == "B":
                open_cat = cat
        else:
            if prefix not in ("M", "E") or cat != open_cat:
                raise CorpusFormatError(
                    f"expected M-{open_cat} or E-{open_cat}, got {label}", line_no
                )
            if prefix == "E":
                open_cat = None
        chars.append(ch)
        labels.append(label)
        last_line = line_no
    flush(last_line)
    return Corpus(sentences)


def save_corpus(path: str | Path, corpus: Corpus) -> None:
    blocks = []
    for text, labels in corpus:
        if len(text) != len(labels):
            raise DataError(f"sentence/label length mismatch for {text!r}")
        blocks.append("\n".join(f"{ch}\t{lab}" for ch, lab in zip(text, labels)))
    Path(path).write_text("\n\n".join(blocks) + "\n", encoding="utf-8")


def split(corpus: Corpus, ratios=(8, 1, 1), seed: int = 0) -> tuple[Corpus, ...]:
    """Deterministic shuffled partition; part sizes are within one sentence
    of the exact ratio (largest-remainder rounding)."""
    if any(r <= 0 for r in ratios):
        raise DataError(f"ratios must be positive, got {ratios}")
    n = len(corpus)
    total = sum(ratios)
    exact = [n * r / total for r in ratios]
    sizes = [int(x) for x in exact]
    remainders = sorted(range(len(ratios)), key=lambda i: exact[i] - sizes[i], reverse=True)
    for i in remainders[: n - sum(sizes)]:
        sizes[i] += 1
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    parts = []
    offset = 0
    for size in sizes:
        parts.append(corpus.subset(indices[offset : offset + size]))
        offset += size
    return tuple(parts)


# ---------------------------------------------------------------------------
# synthetic corpus generation

# Placeholder grammar inside templates:  #CAT#  random surface for CAT,
# #CAT:3# / #CAT:2-4#  pin the generated digit/letter count,
# #CAT=text#  fixed surface.  In literal text, ASCII digit runs and the
# degree symbols are auto-labeled as CARDINAL / MEASURE_UNIT; everything
# else is O.
_SLOT_RE = re.compile(r"#([A-Z_]+)(?::(\d+)(?:-(\d+))?)?(?:=([^#]*))?#")
_AUTO_UNIT_CHARS = {"℃", "°"}

_UNIT_SURFACES = ("cm", "mm", "km", "kg", "mg", "ml", "℃", "GB", "MB", "Hz", "kW")
_PUNC_SURFACES = ("。", "，", "！", "？", "、", "；")
_VERBATIM_SURFACES = ("++", "+", "**", "#", "@", "&")
_FIXED_SURFACES = {
    "POINT": ".",
    "HYPHEN_RANGE": "-",
    "HYPHEN_MINUS": "-",
    "HYPHEN_SUBZERO": "-",
    "HYPHEN_RATIO": "-",
    "HYPHEN_EXTENSION": "-",
    "HYPHEN_IGNORE": "-",
    "SLASH_PER": "/",
    "SLASH_OR": "/",
    "SLASH_YEAR": "/",
    "SLASH_MONTH": "/",
    "COLON_HOUR": ":",
    "COLON_MINUTE": ":",
    "POWER_OPERATOR": "^",
    "NUM_TWO_LIANG": "2",
}

DEFAULT_TEMPLATES = (
    "今天气温#HYPHEN_SUBZERO=-##CARDINAL:1-2#℃#PUNC=，#请注意保暖#PUNC=。#",
    "明天最高温度#CARDINAL:1-2#℃#PUNC=。#",
    "快拨#DIGIT:3#报警#PUNC=！#",
    "客服电话#DIGIT:5##HYPHEN_EXTENSION=-##DIGIT:3#",
    "会议上午#CARDINAL:1##COLON_HOUR=:##MINUTE_CARDINAL#开始",
    "比赛用时#CARDINAL:2##COLON_MINUTE=:##SECOND_CARDINAL#",
    "日期#DIGIT:4##SLASH_YEAR=/##MONTH_CARDINAL#",
    "活动#CARDINAL:1#月#CARDINAL:1-2##HYPHEN_RANGE=-##CARDINAL:2#日举行",
    "最终比分#CARDINAL:1##HYPHEN_RATIO=-##CARDINAL:1#",
    "最低温度是#HYPHEN_MINUS=-##CARDINAL:1-2#度",
    "租金#CARDINAL:3-4#元#SLASH_PER=/#月",
    "午餐提供苹果#SLASH_OR=/#香蕉",
    "进度完成了#SLASH_FRACTION#",
    "圆周率约等于#CARDINAL:1##POINT=.##DIGIT:2-4#",
    "买了#NUM_TWO_LIANG=2#斤苹果",
    "他加入了#ENG_LETTER:2-3#",
    "身高#CARDINAL:3##MEASURE_UNIT=cm#",
    "体重#CARDINAL:2##MEASURE_UNIT=kg#",
    "仪表读数约#CARDINAL:1-3##MEASURE_UNIT#",
    "产品型号是#ENG_LETTER:1##NUM_ENG:1#",
    "我喜欢#ENG_LETTER=C##VERBATIM=++#语言",
    "数学题#CARDINAL:1##POWER_OPERATOR=^##CARDINAL:1#",
    "房间号#ABBR=No##CARDINAL:3#",
    "歌词里写着see#HYPHEN_IGNORE=-#you",
    "密码是#DIGIT:6##PUNC=。#",
    "日期#CARDINAL:1-2##SLASH_MONTH=/##DAY_CARDINAL#",
    "距离大约#CARDINAL:2-3##MEASURE_UNIT=km#",
    "这件事大家已经知道了#PUNC=。#",
    "考试成绩公布了#PUNC=，#大家都很高兴#PUNC=。#",
)


def _random_surface(category: str, rng: random.Random, length: int | None) -> str:
    def digits(lo: int, hi: int) -> str:
        k = length if length is not None else rng.randint(lo, hi)
        return "".join(rng.choice("0123456789") for _ in range(k))

    if category == "CARDINAL":
        k = length if length is not None else rng.randint(1, 4)
        first = rng.choice("123456789") if k > 1 else rng.choice("0123456789")
        return first + "".join(rng.choice("0123456789") for _ in range(k - 1))
    if category == "DIGIT":
        return digits(2, 6)
    if category == "NUM_ENG":
        return digits(1, 1)
    if category == "MONTH_CARDINAL":
        return rng.choice(["%d", "%02d"]) % rng.randint(1, 12)
    if category == "DAY_CARDINAL":
        return rng.choice(["%d", "%02d"]) % rng.randint(1, 28)
    if category in ("MINUTE_CARDINAL", "SECOND_CARDINAL"):
        return "%02d" % rng.randint(0, 59)
    if category == "MEASURE_UNIT":
        return rng.choice(_UNIT_SURFACES)
    if category == "ENG_LETTER":
        k = length if length is not None else rng.randint(2, 4)
        return "".join(rng.choice("ABCDEFGHIJKLMNOPQRSTUVWXYZ") for _ in range(k))
    if category == "PUNC":
        return rng.choice(_PUNC_SURFACES)
    if category == "VERBATIM":
        return rng.choice(_VERBATIM_SURFACES)
    if category == "SLASH_FRACTION":
        denom = rng.randint(2, 99)
        return f"{rng.randint(1, denom - 1)}/{denom}"
    if category == "ABBR":
        return rng.choice(["No", "Tel", "vs"])
    if category in _FIXED_SURFACES:
        return _FIXED_SURFACES[category]
    raise DataError(f"no surface generator for category {category!r}")


def _auto_annotate(literal: str):
    """Spans for NSW-looking literal template text: digit runs -> CARDINAL,
    degree symbols -> MEASURE_UNIT."""
    spans = []
    for m in re.finditer(r"[0-9]+", literal):
        spans.append((m.start(), m.end() - 1, "CARDINAL"))
    for i, ch in enumerate(literal):
        if ch in _AUTO_UNIT_CHARS:
            spans.append((i, i, "MEASURE_UNIT"))
    return sorted(spans)


def instantiate_template(template: str, rng: random.Random) -> tuple[str, list[str]]:
    """Fill one template: returns (sentence, gold label strings)."""
    text_parts: list[str] = []
    spans: list[tuple[int, int, str]] = []
    pos = 0
    cursor = 0

    def add_literal(literal: str) -> None:
        nonlocal pos
        for h, t, cat in _auto_annotate(literal):
            spans.append((pos + h, pos + t, cat))
        text_parts.append(literal)
        pos += len(literal)

    for m in _SLOT_RE.finditer(template):
        add_literal(template[cursor : m.start()])
        category, lo, hi, surface = m.group(1), m.group(2), m.group(3), m.group(4)
        if surface is None:
            length = None
            if lo is not None:
                length = int(lo) if hi is None else rng.randint(int(lo), int(hi))
            surface = _random_surface(category, rng, length)
        if not surface:
            raise DataError(f"template slot for {category} produced empty text")
        spans.append((pos, pos + len(surface) - 1, category))
        text_parts.append(surface)
        pos += len(surface)
        cursor = m.end()
    add_literal(template[cursor:])

    sentence = "".join(text_parts)
    return sentence, spans_to_labels(len(sentence), sorted(spans))


def synthesize_corpus(n: int, seed: int = 0, templates=DEFAULT_TEMPLATES) -> Corpus:
    """Template-filled corpus with gold labels by construction."""
    categories = set()
    for template in templates:
        categories.update(m.group(1) for m in _SLOT_RE.finditer(template))
    if len(categories) < 10:
        raise DataError(
            f"template set covers only {len(categories)} categories, need at least 10"
        )
    rng = random.Random(seed)
    sentences = []
    for _ in range(n):
        template = rng.choice(templates)
        sentences.append(instantiate_template(template, rng))
    return Corpus(sentences)


# ---------------------------------------------------------------------------
# evaluation


def _spans_lenient(labels: list[str]):
    """Span extraction tolerant of ill-formed sequences: only complete
    B..E runs and S tags yield spans; stray or broken runs yield none."""
    spans = []
    head = None
    cat = None
    for pos, label in enumerate(labels):
        prefix, c = split_label(label)
        if prefix == "S":
            spans.append((pos, pos, c))
            head, cat = None, None
        elif prefix == "B":
            head, cat = pos, c
        elif prefix == "M":
            if cat != c:
                head, cat = None, None
        elif prefix == "E":
            if cat == c and head is not None:
                spans.append((head, pos, c))
            head, cat = None, None
        else:
            head, cat = None, None
    return spans


@dataclass
class CategoryScore:
    precision: float
    recall: float
    f1: float
    gold: int
    predicted: int
    correct: int


@dataclass
class EvalReport:
    """Token accuracy plus span-level scores (exact head, tail and category
    match) per category."""

    token_accuracy: float
    sentence_accuracy: float
    per_category: dict[str, CategoryScore]
    macro_f1: float
    confusion: Counter

    def to_dict(self) -> dict:
        return {
            "token_accuracy": self.token_accuracy,
            "sentence_accuracy": self.sentence_accuracy,
            "macro_f1": self.macro_f1,
            "span_matching": "exact head, tail and category",
            "per_category": {
                cat: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "gold": s.gold,
                    "predicted": s.predicted,
                    "correct": s.correct,
                }
                for cat, s in sorted(self.per_category.items())
            },
            "confusion": {f"{g}->{p}": c for (g, p), c in sorted(self.confusion.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    def to_text(self) -> str:
        lines = [
            f"token accuracy    {self.token_accuracy:.4f}",
            f"sentence accuracy {self.sentence_accuracy:.4f}",
            f"macro F1          {self.macro_f1:.4f}",
            "span-level scores (exact head/tail/category match):",
            f"  {'category':<18}{'P':>8}{'R':>8}{'F1':>8}{'gold':>7}{'pred':>7}",
        ]
        for cat, s in sorted(self.per_category.items()):
            lines.append(
                f"  {cat:<18}{s.precision:>8.4f}{s.recall:>8.4f}{s.f1:>8.4f}"
                f"{s.gold:>7}{s.predicted:>7}"
            )
        return "\n".join(lines)


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def evaluate(predictions: list[list[str]], gold: list[list[str]]) -> EvalReport:
    """Score predicted label sequences against gold."""
    if len(predictions) != len(gold):
        raise DataError(f"{len(predictions)} predictions for {len(gold)} gold sentences")
    tokens = 0
    correct_tokens = 0
    correct_sentences = 0
    gold_counts: Counter = Counter()
    pred_counts: Counter = Counter()
    match_counts: Counter = Counter()
    confusion: Counter = Counter()
    for pred, ref in zip(predictions, gold):
        if len(pred) != len(ref):
            raise DataError(
                f"prediction length {len(pred)} does not match gold length {len(ref)}"
            )
        tokens += len(ref)
        hits = sum(p == g for p, g in zip(pred, ref))
        correct_tokens += hits
        correct_sentences += hits == len(ref)
        for p, g in zip(pred, ref):
            if p != g:
                confusion[(g, p)] += 1
        gold_spans = set(_spans_lenient(ref))
        pred_spans = set(_spans_lenient(pred))
        for _, _, cat in gold_spans:
            gold_counts[cat] += 1
        for _, _, cat in pred_spans:
            pred_counts[cat] += 1
        for _, _, cat in gold_spans & pred_spans:
            match_counts[cat] += 1
    per_category = {}
    for cat in sorted(set(gold_counts) | set(pred_counts)):
        correct = match_counts[cat]
        precision = correct / pred_counts[cat] if pred_counts[cat] else 0.0
        recall = correct / gold_counts[cat] if gold_counts[cat] else 0.0
        per_category[cat] = CategoryScore(
            precision=precision,
            recall=recall,
            f1=_f1(precision, recall),
            gold=gold_counts[cat],
            predicted=pred_counts[cat],
            correct=correct,
        )
    macro = (
        sum(s.f1 for s in per_category.values()) / len(per_category) if per_category else 0.0
    )
    return EvalReport(
        token_accuracy=correct_tokens / tokens if tokens else 0.0,
        sentence_accuracy=correct_sentences / len(gold) if gold else 0.0,
        per_category=per_category,
        macro_f1=macro,
        confusion=confusion,
    )
