"""
Run Config Module

Parses and validates the line-oriented run configuration:

    # baseline campaign
    beta = 0.25
    gamma = 0.1
    s0 = 900
    i0 = 100
    r0 = 0

One `key = value` per line, `#` starts a comment, blank lines are ignored.
Keys: beta, gamma, s0, i0, r0 (required), t_end, n_samples, sweep_param,
sweep_values, out_csv, out_svg (optional). Every error names the line and key.
"""

import re
import logging
from typing import Dict, Literal, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator, model_validator

logger = logging.getLogger(__name__)

CONFIG_KEYS = ('beta', 'gamma', 's0', 'i0', 'r0', 't_end', 'n_samples',
               'sweep_param', 'sweep_values', 'out_csv', 'out_svg')
REQUIRED_KEYS = ('beta', 'gamma', 's0', 'i0', 'r0')

LINE_PATTERN = re.compile(r'^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$')


class ConfigError(ValueError):
    """Invalid run configuration; line and key locate the problem when known"""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(key)
        prefix = ': '.join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class RunConfig(BaseModel):
    """Validated run configuration (mirrors the Scenario invariants)"""
    model_config = ConfigDict(extra='forbid', frozen=True, allow_inf_nan=False)

    beta: float = Field(ge=0)
    gamma: float = Field(ge=0)
    s0: float = Field(ge=0)
    i0: float = Field(ge=0)
    r0: float = Field(ge=0)
    t_end: float = Field(default=100.0, gt=0)
    n_samples: int = Field(default=1001, ge=2)
    sweep_param: Optional[Literal['beta', 'gamma', 'seed']] = None
    sweep_values: Optional[Tuple[float, ...]] = None
    out_csv: Optional[str] = None
    out_svg: Optional[str] = None

    @field_validator('sweep_values', mode='before')
    @classmethod
    def _split_values(cls, value):
        if isinstance(value, str):
            parts = [part.strip() for part in value.split(',')]
            if any(not part for part in parts):
                raise ValueError("expected comma-separated numbers")
            return tuple(parts)
        return value

    @field_validator('sweep_values')
    @classmethod
    def _check_values(cls, values, info: ValidationInfo):
        if values is None:
            return values
        if not values:
            raise ValueError("at least one value is required")
        if any(v < 0 for v in values):
            raise ValueError("sweep values must be >= 0")
        data = info.data
        if data.get('sweep_param') == 'seed' and all(k in data for k in ('s0', 'i0', 'r0')):
            n = data['s0'] + data['i0'] + data['r0']
            if any(v > n for v in values):
                raise ValueError(f"seed values must not exceed the population n={n:g}")
        return values

    @field_validator('out_csv', 'out_svg')
    @classmethod
    def _check_path(cls, value):
        # paths must survive emit_config: no comment marker, no edge whitespace, one line
        if value is None:
            return value
        if not value or value != value.strip():
            raise ValueError("path must not be empty or start/end with whitespace")
        if '#' in value or '\n' in value or '\r' in value:
            raise ValueError("path must not contain '#' or line breaks")
        return value

    @model_validator(mode='after')
    def _check_scenario(self):
        if self.population <= 0:
            raise ValueError("s0 + i0 + r0 must be > 0")
        if (self.sweep_param is None) != (self.sweep_values is None):
            raise ValueError("sweep_param and sweep_values must be given together")
        return self

    @property
    def population(self) -> float:
        return self.s0 + self.i0 + self.r0


def read_config_entries(text: str) -> Tuple[Dict[str, str], Dict[str, int]]:
    """
    Split config text into raw values and the line number of every key.

    Raises:
        ConfigError: malformed line, unknown or duplicate key, empty value
    """
    values: Dict[str, str] = {}
    lines: Dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].strip()
        if not content:
            continue
        match = LINE_PATTERN.match(content)
        if not match:
            raise ConfigError("expected 'key = value'", line=number)
        key, value = match.group(1), match.group(2).strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key (allowed: {', '.join(CONFIG_KEYS)})", line=number, key=key)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", line=number, key=key)
        if not value:
            raise ConfigError("empty value", line=number, key=key)
        values[key] = value
        lines[key] = number
    return values, lines


def build_config(values: Mapping[str, object], lines: Optional[Mapping[str, int]] = None) -> RunConfig:
    """
    Validate raw values into a RunConfig. Single validation path for config files and CLI flags.

    Raises:
        ConfigError: missing required keys or a violated invariant
    """
    lines = lines or {}
    missing = [key for key in REQUIRED_KEYS if values.get(key) is None]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    try:
        return RunConfig(**{key: value for key, value in values.items() if value is not None})
    except ValidationError as e:
        error = e.errors()[0]
        key = str(error['loc'][0]) if error['loc'] else None
        raise ConfigError(error['msg'], line=lines.get(key), key=key) from e


def parse_config(text: str) -> RunConfig:
    """Parse and validate config text; defaults t_end=100, n_samples=1001"""
    values, lines = read_config_entries(text)
    config = build_config(values, lines)
    logger.debug(f"✅ Config parsed: {len(values)} keys")
    return config


def load_config(path: str) -> RunConfig:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    return parse_config(text)


def emit_config(config: RunConfig) -> str:
    """Canonical text form; parse_config(emit_config(c)) == c"""
    out = []
    for key in CONFIG_KEYS:
        value = getattr(config, key)
        if value is None:
            continue
        if key == 'sweep_values':
            rendered = ','.join(repr(v) for v in value)
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        out.append(f"{key} = {rendered}")
    return '\n'.join(out) + '\n'
