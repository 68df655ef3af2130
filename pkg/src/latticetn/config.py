"""Run configuration: hyperparameters and file paths.

Sources are layered as CLI flag > config file > dataclass default. The
config file is flat ``key = value`` text; '#' comments and blank lines are
skipped. Path fields left empty fall back to the bundled assets where one
exists.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError


@dataclass
class Config:
    d_model: int = 64
    n_heads: int = 8
    n_layers: int = 1
    d_ff: int = 256
    learning_rate: float = 1e-3
    epochs: int = 5
    dropout: float = 0.0
    seed: int = 7
    scale_attention: bool = True
    pooling: str = "mean"
    use_lexicon: bool = True
    use_rules: bool = True
    lexicon: str = ""
    rules: str = ""
    symbols: str = ""
    units: str = ""
    abbr: str = ""
    corpus: str = ""
    checkpoint: str = "model.npz"

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, values: dict) -> "Config":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)

    def validate(self) -> None:
        """Collect every problem before failing, so one run reports all."""
        problems = []
        if self.d_model <= 0 or self.d_model % 2 != 0:
            problems.append(f"d_model must be positive and even, got {self.d_model}")
        if self.n_heads <= 0 or self.d_model % self.n_heads != 0:
            problems.append(f"d_model {self.d_model} must be divisible by n_heads {self.n_heads}")
        if self.n_layers < 1:
            problems.append(f"n_layers must be >= 1, got {self.n_layers}")
        if self.d_ff < 1:
            problems.append(f"d_ff must be >= 1, got {self.d_ff}")
        if self.learning_rate < 0:
            problems.append(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 0:
            problems.append(f"epochs must be >= 0, got {self.epochs}")
        if not 0.0 <= self.dropout < 1.0:
            problems.append(f"dropout must be in [0, 1), got {self.dropout}")
        if self.pooling not in ("mean", "max"):
            problems.append(f"pooling must be 'mean' or 'max', got {self.pooling!r}")
        for name in ("lexicon", "rules", "symbols", "units", "abbr", "corpus"):
            value = getattr(self, name)
            if value and not Path(value).exists():
                problems.append(f"{name} path does not exist: {value}")
        if problems:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))


def _coerce(name: str, kind, raw: str):
    raw = raw.strip()
    if kind is bool:
        if raw.lower() in ("true", "1", "yes", "on"):
            return True
        if raw.lower() in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{name}: expected {kind.__name__}, got {raw!r}") from None


def load_config(path: str | Path) -> Config:
    """Parse a flat key=value config file."""
    text = Path(path).read_text(encoding="utf-8")
    types = {f.name: f.type for f in fields(Config)}
    # dataclass field types arrive as strings under future annotations
    concrete = {"int": int, "float": float, "bool": bool, "str": str}
    values = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in types:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        kind = concrete[types[key]] if isinstance(types[key], str) else types[key]
        values[key] = _coerce(key, kind, value)
    return Config(**values)
