"""Exception types shared across the toolkit."""


class PinspellError(Exception):
    """Base class for all toolkit errors."""


class ParseError(PinspellError):
    """A data file line could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ConfigurationError(PinspellError):
    """Mismatched or invalid configuration (e.g. index/config fingerprints)."""


class BuildError(PinspellError):
    """An artifact could not be built from the given inputs."""


class ContractError(PinspellError):
    """A caller violated an API precondition (e.g. length mismatch)."""
