"""Exception hierarchy shared across the package."""


class AuthorVerifyError(Exception):
    """Base class for all package errors."""


class InputError(AuthorVerifyError, ValueError):
    """Invalid sample input (empty text, malformed UTF-8)."""


class RegistryError(AuthorVerifyError, KeyError):
    """Unknown tool or schema name."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown registry entry"


class ConfigurationError(AuthorVerifyError):
    """Invalid engine configuration."""


class ContractError(AuthorVerifyError, ValueError):
    """A caller violated an operation's precondition."""


class BackendError(AuthorVerifyError):
    """Base class for completion-service failures."""


class TransportError(BackendError):
    """The live endpoint could not be reached or returned an error."""

    def __init__(self, message, partial_trace=None):
        super().__init__(message)
        self.partial_trace = partial_trace


class FixtureError(BackendError):
    """Replay transcript has no response for a request tag."""

    def __init__(self, tag):
        super().__init__(f"no scripted response for tag {tag}")
        self.tag = tag


class BudgetExceeded(BackendError):
    """A completion would exceed the per-case call cap."""


class FormatError(AuthorVerifyError):
    """A transcript or trace file is corrupt."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class StructuredOutputError(AuthorVerifyError):
    """Model output failed to parse or validate against its schema."""

    def __init__(self, message, raw=None, field=None):
        super().__init__(message)
        self.raw = raw
        self.field = field


class StepParseError(StructuredOutputError):
    """A ReAct step could not be parsed."""


class ReportParseError(StructuredOutputError):
    """A comparator report could not be parsed."""


class SynthesisError(AuthorVerifyError):
    """Synthesis output violated an engine rule after repair."""


class DatasetError(AuthorVerifyError):
    """Dataset layout cannot satisfy a sampling request."""
