"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a documented invariant."""


class NotFoundError(LookupError):
    """A referenced entity (queue level, employee record) does not exist."""


class ConfigError(ValidationError):
    """A pipeline configuration file is invalid; carries the offending line."""

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class PolicyError(Exception):
    """Base class for authority-policy failures."""


class PolicyParseError(PolicyError):
    """Policy text is not well-formed XML; carries the failure position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class PolicySchemaError(PolicyError):
    """A required element is missing from a policy document."""

    def __init__(self, element: str):
        self.element = element
        super().__init__(f"policy document is missing required element '{element}'")


class PolicyValueError(PolicyError, ValueError):
    """Element content failed to parse as the expected value type."""
