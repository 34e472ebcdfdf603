"""Exception types shared across the package."""

from __future__ import annotations


class CftweaveError(Exception):
    """Base class for every error raised by this library."""


class ModelError(CftweaveError):
    """Invalid reference into, or misuse of, a domain model."""


class ParseError(CftweaveError):
    """A model document could not be parsed.

    Carries the 1-based line and column of the first offending position,
    the token text when one was recognised, and the token kinds that would
    have been accepted there.
    """

    def __init__(self, message: str, line: int, column: int,
                 token: str | None = None, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        self.expected = tuple(expected)
        super().__init__(message)

    def __str__(self) -> str:
        text = f"{self.line}:{self.column}: {self.message}"
        if self.token is not None:
            text += f" (got {self.token!r})"
        if self.expected:
            text += "; expected " + " | ".join(self.expected)
        return text


class WeaveError(CftweaveError):
    """Dependency weaving could not be applied to the model."""


class SynthesisError(CftweaveError):
    """Fault-tree synthesis failed for the requested top event."""


class AnalysisError(CftweaveError):
    """Cutset analysis or evaluation rejected its input."""


class OracleError(CftweaveError):
    """The truth-table oracle rejected its input."""
