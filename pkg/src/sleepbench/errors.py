"""Exception hierarchy shared across the package."""


class SleepBenchError(Exception):
    """Base class for all package errors."""


class DimensionError(SleepBenchError, ValueError):
    """Array shapes are incompatible with the requested operation."""


class ParameterError(SleepBenchError, ValueError):
    """A scalar or configuration parameter is out of its allowed range."""


class SchemaError(SleepBenchError):
    """A CSV header does not match the registered dataset schema."""


class ParseError(SleepBenchError, ValueError):
    """A cell could not be parsed under its declared kind."""

    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class IngestionError(SleepBenchError):
    """The input file is empty or otherwise unusable."""


class SingleClassError(SleepBenchError):
    """Derived labels contain only one class."""


class DegenerateDataError(SleepBenchError):
    """The data cannot support the requested split."""


class DivergenceError(SleepBenchError, ArithmeticError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch, learning_rate, loss=float("nan")):
        super().__init__(
            f"non-finite loss {loss!r} at epoch {epoch} (learning rate {learning_rate})"
        )
        self.epoch = epoch
        self.learning_rate = learning_rate


class ContractError(SleepBenchError):
    """A caller violated an operation's precondition."""


class ConfigError(SleepBenchError):
    """A run or model configuration is invalid."""


class ReportError(SleepBenchError):
    """A report could not be produced from the available cells."""
