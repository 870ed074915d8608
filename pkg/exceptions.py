"""Error hierarchy. Each class carries the CLI exit code it maps to."""


class GameError(Exception):
    """Base class for all simulator and analysis errors."""

    exit_code = 3


class UsageError(GameError):
    exit_code = 1


class InputError(GameError):
    """Bad input data, missing columns, unreadable files."""

    exit_code = 2


class ConfigError(InputError):
    """Invalid or missing configuration key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class DomainError(InputError, ValueError):
    """A parameter outside its mathematical domain."""

    def __init__(self, parameter: str, message: str):
        self.parameter = parameter
        super().__init__(f"{parameter}: {message}")


class NumericalError(GameError, ArithmeticError):
    """Non-finite intermediates or failed numerical checks."""

    def __init__(self, message: str, round_index: int | None = None):
        self.round_index = round_index
        if round_index is not None:
            message = f"round {round_index}: {message}"
        super().__init__(message)


class AnalysisError(GameError):
    """Degenerate signal or too little data for an estimator."""
