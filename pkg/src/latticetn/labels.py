"""NSW category set and the BMESO label inventory built from it.

Characters are tagged per position: B/M/E mark the begin, middle and end of
a multi-character categorized span, S a single-character span, and O plain
text that is read as-is. ``O`` is a bare tag; every other category
contributes four tags (B-, M-, E-, S-).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import LabelError

# Closed category set; order is fixed so label indices are stable.
CATEGORIES: tuple[str, ...] = (
    "O",
    "CARDINAL",
    "DIGIT",
    "PUNC",
    "ENG_LETTER",
    "HYPHEN_IGNORE",
    "POINT",
    "VERBATIM",
    "HYPHEN_RANGE",
    "MEASURE_UNIT",
    "SLASH_PER",
    "HYPHEN_RATIO",
    "NUM_TWO_LIANG",
    "COLON_HOUR",
    "MINUTE_CARDINAL",
    "SLASH_OR",
    "NUM_ENG",
    "SLASH_FRACTION",
    "ABBR",
    "DAY_CARDINAL",
    "SLASH_YEAR",
    "SLASH_MONTH",
    "HYPHEN_MINUS",
    "HYPHEN_SUBZERO",
    "MONTH_CARDINAL",
    "COLON_MINUTE",
    "SECOND_CARDINAL",
    "HYPHEN_EXTENSION",
    "POWER_OPERATOR",
)

BMES = ("B", "M", "E", "S")


@dataclass(frozen=True)
class LabelSet:
    """Ordered label inventory with an index map; O always has index 0."""

    labels: tuple[str, ...]

    @classmethod
    def default(cls) -> "LabelSet":
        return cls.for_categories(CATEGORIES)

    @classmethod
    def for_categories(cls, categories) -> "LabelSet":
        labels = ["O"]
        for cat in categories:
            if cat == "O":
                continue
            labels.extend(f"{p}-{cat}" for p in BMES)
        return cls(labels=tuple(labels))

    def __post_init__(self):
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})
        if self.labels[0] != "O":
            raise LabelError("label set must start with O")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise LabelError(f"unknown label {label!r}") from None

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def encode(self, labels: list[str]) -> list[int]:
        return [self.index(lab) for lab in labels]

    def decode(self, indices) -> list[str]:
        return [self.labels[i] for i in indices]

    def save(self, path: str | Path) -> None:
        lines = [f"{i}\t{lab}" for i, lab in enumerate(self.labels)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LabelSet":
        labels = []
        for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            idx_str, _, lab = line.partition("\t")
            try:
                idx = int(idx_str)
            except ValueError:
                raise LabelError(f"line {line_no}: bad index {idx_str!r}") from None
            if idx != len(labels):
                raise LabelError(f"line {line_no}: index {idx} out of order")
            labels.append(lab)
        return cls(labels=tuple(labels))


def split_label(label: str) -> tuple[str, str]:
    """Return (prefix, category): O -> ('O', 'O'), 'B-DIGIT' -> ('B', 'DIGIT')."""
    if label == "O":
        return "O", "O"
    prefix, _, cat = label.partition("-")
    if prefix not in BMES or not cat:
        raise LabelError(f"malformed label {label!r}")
    return prefix, cat


def validate_bmeso(labels: list[str]) -> None:
    """Raise LabelError unless the sequence is a well-formed BMESO tagging.

    B-c opens a span that must continue with M-c or close with E-c; spans
    cannot begin at M/E or be left open at the end of the sentence.
    """
    open_cat = None  # category of the span awaiting its E tag
    for pos, label in enumerate(labels):
        prefix, cat = split_label(label)
        if open_cat is None:
            if prefix in ("M", "E"):
                raise LabelError(f"position {pos}: {label} without a preceding B-{cat}")
            if prefix == "B":
                open_cat = cat
        else:
            if prefix not in ("M", "E") or cat != open_cat:
                raise LabelError(
                    f"position {pos}: expected M-{open_cat} or E-{open_cat}, got {label}"
                )
            if prefix == "E":
                open_cat = None
    if open_cat is not None:
        raise LabelError(f"sequence ends inside an open {open_cat} span")


def is_well_formed(labels: list[str]) -> bool:
    try:
        validate_bmeso(labels)
    except LabelError:
        return False
    return True


def spans_to_labels(length: int, spans) -> list[str]:
    """Label a sentence of the given length from (head, tail, category)
    triples; uncovered positions get O. Spans must not overlap."""
    labels = ["O"] * length
    for head, tail, cat in spans:
        if not (0 <= head <= tail < length):
            raise LabelError(f"span ({head}, {tail}) out of bounds for length {length}")
        for pos in range(head, tail + 1):
            if labels[pos] != "O":
                raise LabelError(f"overlapping spans at position {pos}")
        if head == tail:
            labels[head] = f"S-{cat}"
        else:
            labels[head] = f"B-{cat}"
            for pos in range(head + 1, tail):
                labels[pos] = f"M-{cat}"
            labels[tail] = f"E-{cat}"
    return labels


def labels_to_spans(labels: list[str]) -> list[tuple[int, int, str]]:
    """Maximal B..E and S runs as (head, tail, category) triples, O omitted.
    Requires a well-formed sequence."""
    validate_bmeso(labels)
    spans = []
    head = None
    for pos, label in enumerate(labels):
        prefix, cat = split_label(label)
        if prefix == "S":
            spans.append((pos, pos, cat))
        elif prefix == "B":
            head = pos
        elif prefix == "E":
            spans.append((head, pos, cat))
            head = None
    return spans
