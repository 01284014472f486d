"""Exception types shared across the package."""


class MoefsError(Exception):
    """Base class for all package errors."""


class ConfigError(MoefsError, ValueError):
    """Invalid configuration value or schema."""


class DataError(MoefsError, ValueError):
    """Input data could not be parsed or is unusable.

    ``row`` is the 1-based line number in the source file when known.
    """

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ContractViolation(MoefsError, ValueError):
    """A function was called with arguments outside its contract."""


class EvaluationError(MoefsError, RuntimeError):
    """The neural cost evaluator could not score a subset."""


class TrainingError(MoefsError, RuntimeError):
    """The downstream classifier could not be trained."""
