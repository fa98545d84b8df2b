"""
Errors Module
Exception hierarchy shared by all cohesion modules.

Every error carries a module tag so the command line can print
module-tagged diagnostics. Constraint and frame violations are reported
as data (see networks.Violation and models.FrameViolation), never raised.
"""

from typing import Optional


class CohesionError(Exception):
    """Base class for all errors raised by the toolkit."""

    module = "cohesion"

    def tagged(self) -> str:
        """Return the message prefixed with the module tag."""
        return f"[{self.module}] {self}"


# --- formula ---------------------------------------------------------------

class FormulaSyntaxError(CohesionError, ValueError):
    """Formula text does not conform to the concrete grammar."""

    module = "formula"

    def __init__(self, message: str, position: Optional[int] = None,
                 column: Optional[int] = None):
        self.position = position
        self.column = column
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EmptyGroupError(FormulaSyntaxError):
    """A group literal `{}` with no agents."""


class UnknownTokenError(FormulaSyntaxError):
    """A character sequence that is not a token of the grammar."""


class InvalidGroupError(CohesionError, ValueError):
    """A Group was constructed from an empty or malformed agent set."""

    module = "formula"


class InvalidAtomError(CohesionError, ValueError):
    """An Atom name is not an identifier or is a reserved word."""

    module = "formula"


# --- networks --------------------------------------------------------------

class DegenerateGroupError(CohesionError, ValueError):
    """A singleton group was given where a non-degenerate group is required."""

    module = "networks"


class BoundExceededError(CohesionError, ValueError):
    """A group is larger than the configured enumeration bound."""

    module = "networks"

    def __init__(self, size: int, bound: int):
        self.size = size
        self.bound = bound
        super().__init__(
            f"group of {size} agents exceeds the enumeration bound {bound} "
            f"(raise it with --bound or COHESION_ENUM_BOUND)"
        )


class NonMonotoneClassError(CohesionError, ValueError):
    """minimal_members() was asked for a class that is not edge-monotone."""

    module = "networks"


class InvalidNetworkClassError(CohesionError, ValueError):
    """A class specification is malformed or admits a network outside c0."""

    module = "networks"


# --- reduction -------------------------------------------------------------

class ExpansionBudgetError(CohesionError, RuntimeError):
    """Expansion would exceed the configured output or disjunct budget."""

    module = "reduction"

    def __init__(self, what: str, partial_size: int, limit: int):
        self.what = what
        self.partial_size = partial_size
        self.limit = limit
        super().__init__(
            f"expansion budget exceeded: {what} reached {partial_size} "
            f"(limit {limit})"
        )


class NonBiatFormulaError(CohesionError, ValueError):
    """A formula with a group modality or an assistance node reached BIAT-only code."""

    module = "reduction"


# --- solver ----------------------------------------------------------------

class SolverTimeoutError(CohesionError, TimeoutError):
    """A satisfiability query ran past its deadline."""

    module = "solver"

    def __init__(self, timeout: float, stats: dict):
        self.timeout = timeout
        self.stats = dict(stats)
        details = ", ".join(f"{k}={v}" for k, v in sorted(self.stats.items()))
        super().__init__(f"solver timed out after {timeout:g}s ({details})")


class WitnessValidationError(CohesionError, RuntimeError):
    """A constructed witness model failed independent re-validation."""

    module = "solver"


# --- models ----------------------------------------------------------------

class UnknownWorldError(CohesionError, KeyError):
    """A world id that the model does not contain."""

    module = "models"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class UnknownAgentError(UnknownWorldError):
    """An agent with no neighborhood function in the model."""


class UnknownAtomError(UnknownWorldError):
    """An atom missing from the model's valuation."""


class ModelFormatError(CohesionError, ValueError):
    """A model or class file does not follow its JSON format."""

    module = "storage"


class ModelParameterError(CohesionError, ValueError):
    """Invalid parameters for random model generation."""

    module = "models"


# --- config ----------------------------------------------------------------

class ConfigurationError(CohesionError, ValueError):
    """A malformed environment setting."""

    module = "config"
