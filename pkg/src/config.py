"""
Configuration Module
Runtime settings read from the environment (and an optional .env file).
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional

from dotenv import load_dotenv

from .errors import ConfigurationError


@dataclass(frozen=True)
class Settings:
    """Process-wide settings; CLI flags override them field by field."""

    timeout_secs: float = 30.0
    enumeration_bound: int = 4
    max_output_nodes: int = 1_000_000
    max_disjuncts_per_group: int = 10_000
    allow_self_edges: bool = False
    results_dir: Path = Path("data")
    log_level: str = "WARNING"

    def with_overrides(self, **overrides) -> "Settings":
        """
        Return a copy with every non-None override applied.

        Args:
            **overrides: Field values, None meaning "keep current"

        Returns:
            New Settings instance
        """
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes)

    def enumeration_options(self, literal_gamma: bool = False):
        """Build the network enumeration options these settings describe."""
        from .networks import EnumerationOptions
        return EnumerationOptions(
            bound=self.enumeration_bound,
            allow_self_edges=self.allow_self_edges,
            literal_gamma=literal_gamma,
        )

    def expansion_budget(self):
        """Build the expansion budget these settings describe."""
        from .reduction import ExpansionBudget
        return ExpansionBudget(
            max_output_nodes=self.max_output_nodes,
            max_disjuncts_per_group=self.max_disjuncts_per_group,
        )


_ENV_FIELDS = {
    "COHESION_TIMEOUT_SECS": ("timeout_secs", float),
    "COHESION_ENUM_BOUND": ("enumeration_bound", int),
    "COHESION_MAX_OUTPUT_NODES": ("max_output_nodes", int),
    "COHESION_MAX_DISJUNCTS": ("max_disjuncts_per_group", int),
    "COHESION_ALLOW_SELF_EDGES": ("allow_self_edges", "bool"),
    "COHESION_RESULTS_DIR": ("results_dir", Path),
    "COHESION_LOG_LEVEL": ("log_level", str),
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _convert(variable: str, raw: str, kind):
    if kind == "bool":
        value = raw.strip().lower()
        if value in _TRUE:
            return True
        if value in _FALSE:
            return False
        raise ConfigurationError(f"{variable} must be a boolean, got {raw!r}")
    try:
        converted = kind(raw.strip())
    except ValueError:
        raise ConfigurationError(
            f"{variable} must be of type {kind.__name__}, got {raw!r}"
        ) from None
    if kind in (int, float) and converted <= 0:
        raise ConfigurationError(f"{variable} must be positive, got {raw!r}")
    return converted


def load_settings(env: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Load settings from the environment.

    Args:
        env: Explicit variable mapping (tests); when None the .env file is
            loaded and os.environ is used

    Returns:
        Settings with every recognised COHESION_* variable applied
    """
    if env is None:
        load_dotenv()
        env = os.environ

    values = {}
    for variable, (field_name, kind) in _ENV_FIELDS.items():
        raw = env.get(variable)
        if raw is not None:
            values[field_name] = _convert(variable, raw, kind)

    return Settings(**values)
