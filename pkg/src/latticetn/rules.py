"""Regex rules proposing candidate non-standard-word spans.

Rules carry no categories and no context conditions: they only mark
substrings that might need spoken-form conversion. Category disambiguation
is the tagger's job.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import RuleCompileError
from .lattice import Token, TokenKind


@dataclass(frozen=True)
class Rule:
    name: str
    pattern: str
    regex: re.Pattern

    def __repr__(self) -> str:
        return f"Rule({self.name}={self.pattern})"


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)


def compile_rules(source: str) -> RuleSet:
    """Compile rule file text: one ``name<TAB>pattern`` per line, '#'
    comments and blank lines skipped. Errors carry the offending line number.
    """
    rules = []
    names = set()
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise RuleCompileError(f"expected name<TAB>pattern, got {line!r}", line_no)
        name, _, pattern = line.partition("\t")
        name = name.strip()
        if not name:
            raise RuleCompileError("empty rule name", line_no)
        if name in names:
            raise RuleCompileError(f"duplicate rule name {name!r}", line_no)
        if not pattern:
            raise RuleCompileError(f"rule {name!r} has an empty pattern", line_no)
        try:
            regex = re.compile(pattern)
        except re.error as exc:
            raise RuleCompileError(f"rule {name!r} pattern does not compile: {exc}", line_no) from exc
        names.add(name)
        rules.append(Rule(name=name, pattern=pattern, regex=regex))
    return RuleSet(rules=tuple(rules))


def load_rules(path: str | Path) -> RuleSet:
    return compile_rules(Path(path).read_text(encoding="utf-8"))


def match_rules(sentence: str, rules: RuleSet) -> list[Token]:
    """Scan the sentence with every rule.

    Within one rule matches are leftmost and non-overlapping (standard scan
    semantics); candidates from different rules may overlap freely.
    Zero-width matches are discarded. Indices are character offsets.
    """
    out = []
    for rule in rules:
        for m in rule.regex.finditer(sentence):
            if m.end() == m.start():
                continue
            out.append(
                Token(m.group(), m.start(), m.end() - 1, TokenKind.NSW, rule=rule.name)
            )
    return out
