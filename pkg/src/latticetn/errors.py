"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 1, DataError and its
subclasses -> 2, NumericError -> 3.
"""


class LatticeTnError(Exception):
    """Base class for all package errors."""


class ConfigError(LatticeTnError):
    """Invalid configuration or command usage."""


class DataError(LatticeTnError):
    """Malformed input data (corpora, lexicons, rule files, checkpoints)."""


class SpanBoundsError(DataError):
    """A token span does not fit the sentence it claims to come from."""


class RuleCompileError(DataError):
    """A rule file line failed to parse or its pattern failed to compile."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class CorpusFormatError(DataError):
    """A corpus file violates the character/label column format."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class LabelError(DataError):
    """An ill-formed BMESO label sequence or unknown label."""


class UnmappedSymbolError(DataError):
    """A verbalizer lexicon has no reading for a symbol."""

    def __init__(self, symbol: str, category: str):
        super().__init__(f"no reading for symbol {symbol!r} (category {category})")
        self.symbol = symbol
        self.category = category


class CheckpointError(DataError):
    """A checkpoint file is missing, corrupt, or incompatible."""


class NumericError(LatticeTnError):
    """Non-finite values encountered during model computation."""
