"""Experiment configuration and resource budgets.

Budgets come from code defaults and may be overridden by the environment
(LACUNARIA_BUDGET); experiment settings come from a JSON file whose keys
mirror the command line flags, with explicit flags taking priority.
"""

import os
import json
import logging
from dataclasses import dataclass, field, asdict, fields
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

import numpy as np

from src.common.errors import ConfigError

logger = logging.getLogger(__name__)

BUDGET_ENV_VAR = 'LACUNARIA_BUDGET'

DEFAULT_BALL_CAP = 5_000_000
DEFAULT_PRODUCT_CAP = 2_000_000
DEFAULT_SUPPORT_CAP = 200_000
DEFAULT_SEQUENCE_CAP = 2_000_000


@dataclass(frozen=True)
class Budget:
    """Hard caps on enumeration sizes."""
    ball_cap: int = DEFAULT_BALL_CAP
    product_cap: int = DEFAULT_PRODUCT_CAP
    support_cap: int = DEFAULT_SUPPORT_CAP
    sequence_cap: int = DEFAULT_SEQUENCE_CAP

    @classmethod
    def from_env(cls) -> 'Budget':
        """Build a budget, letting LACUNARIA_BUDGET override ball and product caps."""
        raw = os.environ.get(BUDGET_ENV_VAR)
        if not raw:
            return cls()
        try:
            value = int(raw)
            if value <= 0:
                raise ValueError(value)
        except ValueError:
            logger.warning(f"Ignoring malformed {BUDGET_ENV_VAR}={raw!r}, using default caps")
            return cls()
        logger.debug(f"{BUDGET_ENV_VAR} overrides ball and product caps with {value}")
        return cls(ball_cap=value, product_cap=value)


_active_budget: Optional[Budget] = None


@contextmanager
def budget_scope(budget: Budget) -> Iterator[Budget]:
    """Make `budget` the one consulted by resolve_cap inside the block."""
    global _active_budget
    previous, _active_budget = _active_budget, budget
    try:
        yield budget
    finally:
        _active_budget = previous


def resolve_cap(cap: Optional[int], kind: str) -> int:
    """Return an explicit cap, or the active budget's (environment budget by default) for `kind`."""
    if cap is not None:
        if cap <= 0:
            raise ConfigError(f"{kind} must be positive, got {cap}")
        return int(cap)
    budget = _active_budget if _active_budget is not None else Budget.from_env()
    return getattr(budget, kind)


@dataclass
class ExperimentConfig:
    """Settings for one CLI experiment run."""
    psi: str = 'word'
    rank: int = 2
    ball: int = 2
    element: Optional[str] = None
    words: Optional[str] = None
    seq: Optional[str] = None
    phi: Optional[str] = None
    grid_min: Optional[float] = None
    grid_max: Optional[float] = None
    grid_n: int = 49
    log_spaced: bool = True
    radius: int = 8
    samples: int = 2 ** 16
    trials: int = 64
    seed: int = 0
    output_format: str = 'json'
    p: int = 4
    n: int = 2
    m: int = 4
    oracle: Optional[int] = None
    kind: str = 'lambda'
    dim: int = 1
    torus: bool = False
    letters: bool = False
    coefficient_norm: str = 'operator'
    cover_delta: Optional[float] = None
    ball_cap: int = field(default_factory=lambda: Budget.from_env().ball_cap)
    product_cap: int = field(default_factory=lambda: Budget.from_env().product_cap)
    support_cap: int = field(default_factory=lambda: Budget.from_env().support_cap)
    sequence_cap: int = field(default_factory=lambda: Budget.from_env().sequence_cap)

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> 'ExperimentConfig':
        """Read a JSON config file (if any) and apply flag overrides.

        Args:
            path: JSON file whose keys mirror the flag names
            overrides: Flag values; None entries mean "not given"

        Returns:
            A validated ExperimentConfig
        """
        known = {f.name for f in fields(cls)}
        values: Dict[str, Any] = {}

        if path:
            try:
                with open(path, 'r') as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"Cannot read config file {path}: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"Config file {path} must hold a JSON object")
            for key, value in data.items():
                key = key.replace('-', '_')
                if key == 'format':
                    key = 'output_format'
                if key not in known:
                    raise ConfigError(f"Unknown config key '{key}' in {path}")
                values[key] = value

        for key, value in (overrides or {}).items():
            if value is not None and key in known:
                values[key] = value

        config = cls(**values)
        config.validate()
        return config

    def validate(self):
        """Raise ConfigError on inconsistent settings."""
        for cap_name in ('ball_cap', 'product_cap', 'support_cap', 'sequence_cap'):
            if int(getattr(self, cap_name)) <= 0:
                raise ConfigError(f"{cap_name} must be positive")
        if self.grid_min is not None and self.grid_max is not None and not self.grid_min < self.grid_max:
            raise ConfigError(f"grid min {self.grid_min} must be below grid max {self.grid_max}")
        if self.grid_min is not None and self.grid_min <= 0:
            raise ConfigError("grid min must be positive")
        if self.grid_n < 1:
            raise ConfigError("grid must have at least one point")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if self.output_format not in ('json', 'csv'):
            raise ConfigError(f"Unknown output format '{self.output_format}'")
        if self.radius < 0:
            raise ConfigError("radius must be nonnegative")
        if self.coefficient_norm not in ('operator', 'schatten'):
            raise ConfigError(f"Unknown coefficient norm '{self.coefficient_norm}'")

    def budget(self) -> Budget:
        """The caps of this run as a Budget."""
        return Budget(ball_cap=int(self.ball_cap), product_cap=int(self.product_cap),
                      support_cap=int(self.support_cap), sequence_cap=int(self.sequence_cap))

    def has_grid(self) -> bool:
        return self.grid_min is not None and self.grid_max is not None

    def t_grid(self) -> Optional[np.ndarray]:
        """Realize the configured t-grid, or None to let the operation pick its default."""
        if not self.has_grid():
            return None
        if self.grid_n == 1:
            return np.array([float(self.grid_min)])
        if self.log_spaced:
            return np.geomspace(float(self.grid_min), float(self.grid_max), int(self.grid_n))
        return np.linspace(float(self.grid_min), float(self.grid_max), int(self.grid_n))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def parse_grid(spec: str) -> Dict[str, Any]:
    """Parse a 'min:max:n' grid flag into config overrides."""
    parts = spec.split(':')
    if len(parts) != 3:
        raise ConfigError(f"Grid must look like min:max:n, got '{spec}'")
    try:
        return {'grid_min': float(parts[0]), 'grid_max': float(parts[1]), 'grid_n': int(parts[2])}
    except ValueError as e:
        raise ConfigError(f"Malformed grid '{spec}': {e}") from e
