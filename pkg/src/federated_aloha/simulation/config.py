"""
Experiment configuration for the simulator.

This module provides:
- the `SimConfig` dataclass with documented defaults and invariant checks,
- parsing of the line-oriented `key=value` config document,
- rendering a config back to that document (exact round trip).

Document format: one `key=value` per line, keys are the `SimConfig` field
names, blank lines and lines starting with `#` are ignored, a key may appear
at most once. Missing keys take their defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict

from ..access import Policy
from ..model import AggregationMode, SignificanceMode


class ConfigValidationError(ValueError):
    """Raised when a config document or a SimConfig is invalid."""
    pass


@dataclass(frozen=True)
class SimConfig:
    """
    Full description of one experiment.

    Attributes:
        K: Number of users.
        M: Number of uplink channels (1 <= M <= K).
        L: Dimension of the weight vector.
        mu1: Local gradient-descent step size.
        mu: Dual-ascent step size for the feedback psi.
        p_comp: Probability that a user can compute its update in an iteration.
        T: Number of iterations.
        policy: Upload discipline.
        significance_mode: Norm each user reports for adaptive access.
        aggregation_mode: How received updates are combined.
        seed: Seed of the run generator (run r of a batch uses seed ^ r).
        runs: Number of runs averaged by `run_many`.
    """
    K: int = 1000
    M: int = 10
    L: int = 10
    mu1: float = 0.01
    mu: float = 0.1
    p_comp: float = 0.1
    T: int = 1000
    policy: Policy = Policy.ADAPTIVE_ALOHA
    significance_mode: SignificanceMode = SignificanceMode.GRADIENT_NORM
    aggregation_mode: AggregationMode = AggregationMode.MEAN
    seed: int = 0
    runs: int = 1

    def __post_init__(self) -> None:
        validate_config(self)


_INT_KEYS = {"K", "M", "L", "T", "seed", "runs"}
_FLOAT_KEYS = {"mu1", "mu", "p_comp"}
_ENUM_KEYS = {
    "policy": Policy,
    "significance_mode": SignificanceMode,
    "aggregation_mode": AggregationMode,
}
VALID_KEYS = tuple(f.name for f in fields(SimConfig))


def validate_config(config: SimConfig) -> None:
    """
    Check every SimConfig invariant.

    Raises:
        ConfigValidationError: Naming the first violated invariant.
    """
    for name in ("K", "M", "L", "T", "runs"):
        value = getattr(config, name)
        if value < 1:
            raise ConfigValidationError(f"Invalid configuration: {name} must be at least 1, got {value}")
    if config.M > config.K:
        raise ConfigValidationError(
            f"Invalid configuration: M ({config.M}) must not exceed K ({config.K})"
        )
    if config.seed < 0:
        raise ConfigValidationError(f"Invalid configuration: seed must be nonnegative, got {config.seed}")
    for name in ("mu1", "mu"):
        value = getattr(config, name)
        if not (math.isfinite(value) and value > 0):
            raise ConfigValidationError(f"Invalid configuration: {name} must be positive, got {value}")
    if not 0.0 <= config.p_comp <= 1.0:
        raise ConfigValidationError(
            f"Invalid configuration: p_comp must be in [0, 1], got {config.p_comp}"
        )
    for name, enum_type in _ENUM_KEYS.items():
        if not isinstance(getattr(config, name), enum_type):
            raise ConfigValidationError(
                f"Invalid configuration: {name} must be a {enum_type.__name__}"
            )


def _parse_value(key: str, raw: str, line_no: int) -> Any:
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        return _ENUM_KEYS[key](raw)
    except ValueError:
        if key in _INT_KEYS:
            expected = "an integer"
        elif key in _FLOAT_KEYS:
            expected = "a number"
        else:
            expected = "one of " + ", ".join(m.value for m in _ENUM_KEYS[key])
        raise ConfigValidationError(
            f"Line {line_no}: invalid value for '{key}': '{raw}' (expected {expected})"
        ) from None


def parse_config(text: str) -> SimConfig:
    """
    Parse a `key=value` document into a validated SimConfig.

    Raises:
        ConfigValidationError: On a malformed line, an unknown or repeated key,
            an unparsable value, or a violated invariant.
    """
    values: Dict[str, Any] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigValidationError(
                f"Line {line_no}: expected key=value, got '{stripped}'"
            )
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in VALID_KEYS:
            raise ConfigValidationError(
                f"Line {line_no}: unknown key '{key}'. Valid keys are: {', '.join(VALID_KEYS)}"
            )
        if key in values:
            raise ConfigValidationError(f"Line {line_no}: duplicate key '{key}'")
        values[key] = _parse_value(key, raw, line_no)

    return SimConfig(**values)


def render_config(config: SimConfig) -> str:
    """Render a config as a document that `parse_config` maps back to it."""
    lines = []
    for name in VALID_KEYS:
        value = getattr(config, name)
        if name in _ENUM_KEYS:
            text = value.value
        elif name in _FLOAT_KEYS:
            text = repr(float(value))
        else:
            text = str(value)
        lines.append(f"{name}={text}")
    return "\n".join(lines) + "\n"


def load_config(path: str | Path) -> SimConfig:
    """
    Read and parse a config file.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ConfigValidationError: If the document is invalid.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"))


def config_help() -> str:
    """One line per key with its default, for the CLI help text."""
    return render_config(SimConfig()).rstrip("\n")
