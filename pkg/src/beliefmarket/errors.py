"""Exception types shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-raised errors."""


class SentenceSyntaxError(EngineError):
    """Malformed sentence text; carries the character position of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UncoveredAtomError(EngineError):
    """A sentence was evaluated in a world that does not assign one of its atoms."""

    def __init__(self, atom_name: str):
        super().__init__(f"world does not cover atom {atom_name!r}")
        self.atom_name = atom_name


class SupportError(EngineError):
    """A world-enumeration support set does not cover the fragment's atoms."""


class EnumerationCapError(EngineError):
    """World enumeration exceeded the configured cap."""


class InconsistentFragmentError(EngineError):
    """A theory fragment admits no satisfying world."""

    def __init__(self, message: str, day: int | None = None):
        super().__init__(message)
        self.day = day


class NestednessError(EngineError):
    """A deductive process dropped a sentence it had previously emitted."""

    def __init__(self, day: int, missing: str):
        super().__init__(
            f"deductive process not nested at day {day}: sentence {missing!r} "
            f"from day {day - 1} is missing"
        )
        self.day = day
        self.missing = missing


class EvaluationError(EngineError):
    """A feature or rule was evaluated against insufficient history."""


class StrategyError(EngineError):
    """Malformed trading-strategy text or an invalid strategy construct."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ResolutionFailureError(EngineError):
    """No certified price vector exists at the configured resolution."""

    def __init__(self, day: int, best_value, epsilon):
        super().__init__(
            f"day {day}: no price vector certified at the configured resolution "
            f"(best plausible value {best_value}, required <= {epsilon}); "
            f"refine the resolution or relax the epsilon schedule"
        )
        self.day = day
        self.best_value = best_value
        self.epsilon = epsilon


class ConfigError(EngineError):
    """Invalid scenario, pool, or engine configuration."""


class ScriptError(ConfigError):
    """Malformed deduction script file."""
