"""Spoken-form conversion of tagged NSW spans.

Each category binds one conversion function: fixed readings for connector
symbols (点, 到, 每, ...), digit-by-digit or cardinal readings for numbers,
and lexicon lookups for units, abbreviations and symbol-by-symbol readings.
Punctuation and ignorable hyphens verbalize to the empty string, deleting
them from the output.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DataError, LabelError, UnmappedSymbolError
from .labels import CATEGORIES, labels_to_spans

CHINESE_DIGITS = "零一二三四五六七八九"
_SMALL_UNITS = ("", "十", "百", "千")
_GROUP_UNITS = ("", "万", "亿", "万亿")

# Categories read as one fixed string regardless of surface text.
_FIXED_READING = {
    "POINT": "点",
    "HYPHEN_RANGE": "到",
    "SLASH_PER": "每",
    "HYPHEN_RATIO": "比",
    "NUM_TWO_LIANG": "两",
    "COLON_HOUR": "点",
    "SLASH_OR": "或",
    "HYPHEN_MINUS": "负",
    "HYPHEN_SUBZERO": "零下",
    "COLON_MINUTE": "分",
    "HYPHEN_EXTENSION": "转",
    "POWER_OPERATOR": "次方",
    "SLASH_YEAR": "年",
    "SLASH_MONTH": "月",
}

# Categories read as a cardinal plus a time/date suffix.
_CARDINAL_SUFFIX = {
    "MINUTE_CARDINAL": "分",
    "DAY_CARDINAL": "日",
    "MONTH_CARDINAL": "月",
    "SECOND_CARDINAL": "秒",
}

_DROPPED = {"PUNC", "HYPHEN_IGNORE"}


def read_digits(digits: str) -> str:
    """Digit-by-digit reading: '911' -> 九一一."""
    if not digits or any(c not in "0123456789" for c in digits):
        raise DataError(f"digit-by-digit reading requires decimal digits, got {digits!r}")
    return "".join(CHINESE_DIGITS[int(c)] for c in digits)


def _read_group(group: int) -> str:
    """Read 1..9999 with 千/百/十 units; internal zero runs collapse to one 零."""
    out = []
    started = False
    zero_pending = False
    for ch, unit in zip(f"{group:04d}", ("千", "百", "十", "")):
        d = int(ch)
        if d == 0:
            zero_pending = zero_pending or started
            continue
        if zero_pending:
            out.append("零")
            zero_pending = False
        out.append(CHINESE_DIGITS[d] + unit)
        started = True
    return "".join(out)


def read_cardinal(digits: str) -> str:
    """Standard Mandarin cardinal reading of a decimal digit string.

    Zero runs collapse to a single 零, bare tens drop the leading 一
    (11 -> 十一), and 两 is never produced (that is the NUM_TWO_LIANG
    category's reading). Supports up to 16 digits via 万/亿 grouping.
    """
    if not digits or any(c not in "0123456789" for c in digits):
        raise DataError(f"cardinal reading requires decimal digits, got {digits!r}")
    if len(digits) > 16:
        raise DataError(f"cardinal reading supports at most 16 digits, got {len(digits)}")
    n = int(digits)
    if n == 0:
        return "零"
    groups = []  # least significant 4-digit group first
    while n:
        groups.append(n % 10000)
        n //= 10000
    parts = []
    prev_gi = None
    for gi in range(len(groups) - 1, -1, -1):
        group = groups[gi]
        if group == 0:
            continue
        if prev_gi is not None and (prev_gi - gi > 1 or group < 1000):
            parts.append("零")
        parts.append(_read_group(group) + _GROUP_UNITS[gi])
        prev_gi = gi
    reading = "".join(parts)
    if reading.startswith("一十"):
        reading = reading[1:]
    return reading


@dataclass(frozen=True)
class TaggedSpan:
    """A categorized sentence slice awaiting verbalization."""

    text: str
    head: int
    tail: int
    category: str


def spans_from_labels(sentence: str, labels: list[str]) -> list[TaggedSpan]:
    """Group a well-formed BMESO labeling into tagged spans; O positions
    are omitted."""
    if len(labels) != len(sentence):
        raise LabelError(
            f"label count {len(labels)} does not match sentence length {len(sentence)}"
        )
    return [
        TaggedSpan(text=sentence[h : t + 1], head=h, tail=t, category=cat)
        for h, t, cat in labels_to_spans(labels)
    ]


def _load_tsv(path) -> dict[str, str]:
    table = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        surface, _, reading = line.partition("\t")
        table[surface] = reading
    return table


def asset_path(name: str):
    """Path-like handle on a bundled data file."""
    return resources.files("latticetn").joinpath("assets").joinpath(name)


class Verbalizer:
    """Category dispatch over the symbol, unit and abbreviation lexicons."""

    def __init__(self, symbols: dict[str, str], units: dict[str, str], abbr: dict[str, str]):
        self.symbols = symbols
        self.units = units
        self.abbr = abbr

    @classmethod
    def from_files(cls, symbols_path, units_path, abbr_path) -> "Verbalizer":
        return cls(_load_tsv(symbols_path), _load_tsv(units_path), _load_tsv(abbr_path))

    @classmethod
    def default(cls) -> "Verbalizer":
        return cls.from_files(
            asset_path("symbols.tsv"), asset_path("units.tsv"), asset_path("abbr.tsv")
        )

    def _spell(self, text: str, category: str) -> str:
        readings = []
        for ch in text:
            if ch not in self.symbols:
                raise UnmappedSymbolError(ch, category)
            readings.append(self.symbols[ch])
        return " ".join(readings)

    def _fraction(self, text: str) -> str:
        if text == "/":
            return "分之"
        numer, slash, denom = text.partition("/")
        if not slash or not numer.isdigit() or not denom.isdigit():
            raise UnmappedSymbolError(text, "SLASH_FRACTION")
        return read_cardinal(denom) + "分之" + read_cardinal(numer)

    def verbalize(self, span: TaggedSpan) -> str:
        """Spoken-form string for one tagged span."""
        cat = span.category
        if cat == "O":
            raise LabelError("O spans are not verbalized")
        if cat not in CATEGORIES:
            raise LabelError(f"unknown category {cat!r}")
        if cat in _DROPPED:
            return ""
        if cat in _FIXED_READING:
            return _FIXED_READING[cat]
        if cat in _CARDINAL_SUFFIX:
            return read_cardinal(span.text) + _CARDINAL_SUFFIX[cat]
        if cat == "CARDINAL":
            return read_cardinal(span.text)
        if cat == "DIGIT":
            return read_digits(span.text)
        if cat == "MEASURE_UNIT":
            if span.text not in self.units:
                raise UnmappedSymbolError(span.text, cat)
            return self.units[span.text]
        if cat in ("ENG_LETTER", "VERBATIM", "NUM_ENG"):
            return self._spell(span.text, cat)
        if cat == "SLASH_FRACTION":
            return self._fraction(span.text)
        if cat == "ABBR":
            if span.text not in self.abbr:
                raise UnmappedSymbolError(span.text, cat)
            return self.abbr[span.text]
        raise LabelError(f"no conversion function for category {cat!r}")


def normalize_sentence(sentence: str, spans: list[TaggedSpan], verbalizer: Verbalizer) -> str:
    """Replace each tagged span with its spoken form, keep O text intact.

    Spans must be sorted by position and non-overlapping.
    """
    out = []
    cursor = 0
    for span in spans:
        if span.head < cursor:
            raise DataError(
                f"overlapping or unsorted span ({span.head}, {span.tail}) {span.text!r}"
            )
        out.append(sentence[cursor : span.head])
        out.append(verbalizer.verbalize(span))
        cursor = span.tail + 1
    out.append(sentence[cursor:])
    return "".join(out)
