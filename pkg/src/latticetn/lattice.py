"""Flat token lattice over a sentence.

A lattice holds one token per character of the sentence, followed by span
tokens: words matched against a lexicon and candidate non-standard words
proposed by rules. Every token records its head and tail character index
(inclusive, counting Unicode scalar values) in the original sentence.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .errors import SpanBoundsError


class TokenKind(Enum):
    CHAR = "char"
    WORD = "word"
    NSW = "nsw"


# Span ordering: lexicon words before rule candidates at equal (head, tail).
_KIND_RANK = {TokenKind.CHAR: 0, TokenKind.WORD: 1, TokenKind.NSW: 2}


@dataclass(frozen=True)
class Token:
    """One lattice node: a sentence slice with provenance.

    ``rule`` names the matching rule for NSW candidates and is None
    otherwise; two NSW tokens over the same span but from different rules
    are distinct nodes.
    """

    text: str
    head: int
    tail: int
    kind: TokenKind
    rule: str | None = None

    def validate(self, sentence: str) -> None:
        if not (0 <= self.head <= self.tail < len(sentence)):
            raise SpanBoundsError(
                f"span ({self.head}, {self.tail}) {self.text!r} out of bounds "
                f"for sentence of length {len(sentence)}"
            )
        if sentence[self.head : self.tail + 1] != self.text:
            raise SpanBoundsError(
                f"span ({self.head}, {self.tail}) text {self.text!r} does not "
                f"match sentence slice {sentence[self.head:self.tail + 1]!r}"
            )
        if self.kind is TokenKind.CHAR and self.head != self.tail:
            raise SpanBoundsError(f"character token {self.text!r} spans more than one position")

    @property
    def length(self) -> int:
        return self.tail - self.head + 1


@dataclass(frozen=True)
class FlatLattice:
    """Ordered token sequence over a sentence.

    tokens[0:char_count] are the character tokens in sentence order;
    the remaining span tokens are sorted by (head, tail, kind, rule).
    """

    sentence: str
    tokens: tuple[Token, ...]
    char_count: int

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def span_tokens(self) -> tuple[Token, ...]:
        return self.tokens[self.char_count :]

    def heads(self) -> list[int]:
        return [t.head for t in self.tokens]

    def tails(self) -> list[int]:
        return [t.tail for t in self.tokens]


class Lexicon:
    """Word list organized as a prefix tree for all-substring matching.

    Entries shorter than two characters are ignored: single characters are
    already lattice nodes.
    """

    def __init__(self, words: Iterable[str] = ()):
        self._root: dict = {}
        self._size = 0
        for w in words:
            self.add(w)

    def add(self, word: str) -> None:
        if len(word) < 2:
            return
        node = self._root
        for ch in word:
            node = node.setdefault(ch, {})
        if None not in node:
            node[None] = True
            self._size += 1

    def __len__(self) -> int:
        return self._size

    def __contains__(self, word: str) -> bool:
        node = self._root
        for ch in word:
            node = node.get(ch)
            if node is None:
                return False
        return None in node

    def matches_from(self, sentence: str, start: int) -> Iterator[int]:
        """Yield every inclusive end index of a lexicon word starting at start."""
        node = self._root
        for i in range(start, len(sentence)):
            node = node.get(sentence[i])
            if node is None:
                return
            if None in node:
                yield i

    @classmethod
    def from_file(cls, path: str | Path) -> "Lexicon":
        """Load one word per line; blank lines and '#' comments are skipped."""
        lex = cls()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            word = line.strip()
            if not word or word.startswith("#"):
                continue
            lex.add(word)
        return lex


def match_lexicon(sentence: str, lexicon: Lexicon) -> list[Token]:
    """All lexicon words occurring in the sentence, nested and overlapping
    matches included, ordered by (head, tail)."""
    out = []
    for head in range(len(sentence)):
        for tail in lexicon.matches_from(sentence, head):
            out.append(Token(sentence[head : tail + 1], head, tail, TokenKind.WORD))
    return out


def _span_sort_key(tok: Token):
    return (tok.head, tok.tail, _KIND_RANK[tok.kind], tok.rule or "")


def build_lattice(
    sentence: str,
    word_spans: Iterable[Token] = (),
    nsw_spans: Iterable[Token] = (),
) -> FlatLattice:
    """Assemble the flat lattice: character tokens first, then deduplicated,
    canonically ordered span tokens.

    Duplicates within one kind collapse (for NSW candidates the rule name is
    part of the identity); the same span matched by both channels yields two
    tokens. Raises SpanBoundsError for spans that do not fit the sentence.
    """
    chars = [Token(ch, i, i, TokenKind.CHAR) for i, ch in enumerate(sentence)]
    seen = set()
    spans = []
    for tok in list(word_spans) + list(nsw_spans):
        tok.validate(sentence)
        key = (tok.head, tok.tail, tok.kind, tok.rule)
        if key in seen:
            continue
        seen.add(key)
        spans.append(tok)
    spans.sort(key=_span_sort_key)
    return FlatLattice(sentence=sentence, tokens=tuple(chars + spans), char_count=len(sentence))
