"""Exception hierarchy shared by all modules."""


class ComponentShrinkError(Exception):
    """Base class for every error raised by this package."""


class DataError(ComponentShrinkError):
    """Input data could not be used (maps to CLI exit status 2)."""


class SchemaError(DataError):
    def __init__(self, column, source="input"):
        self.column = column
        super().__init__(f"{source}: missing required column {column!r}")


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataIntegrityError(DataError):
    """A record violates a counting invariant (e.g. more hits than at-bats)."""


class InsufficientDataError(DataError):
    """Too few usable observations to fit a model."""


class ConfigurationError(ComponentShrinkError):
    """Caller supplied inconsistent configuration (e.g. a missing season fit)."""


class DomainError(ComponentShrinkError, ValueError):
    """A numeric argument lies outside the function's domain."""


class DegeneratePitcherError(DomainError):
    """FIP ability is undefined because its denominator vanishes."""
