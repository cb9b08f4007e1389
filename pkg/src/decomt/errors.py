"""Exception taxonomy for the toolkit.

Grouped by origin so the CLI can map failures onto distinct exit codes:
validation problems (bad inputs, malformed files, mismatched corpora) versus
backend problems (transport, protocol, prompt shape).
"""
from __future__ import annotations


class DecomtError(Exception):
    """Base class for all toolkit errors."""


# --- input / corpus validation -------------------------------------------

class EmptySentence(DecomtError):
    pass


class InvalidChunkSize(DecomtError):
    pass


class ParseError(DecomtError):
    """Malformed document; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class AlignmentError(DecomtError):
    pass


class WindowSizeError(DecomtError):
    pass


class LengthMismatch(DecomtError):
    pass


class EmptyCorpus(DecomtError):
    pass


class TooFewSamples(DecomtError):
    pass


class MetricMismatch(DecomtError):
    pass


class LineCountMismatch(DecomtError):
    pass


class EncodingError(DecomtError):
    pass


class SinkError(DecomtError):
    pass


class ConfigError(DecomtError):
    pass


# --- backend ---------------------------------------------------------------

class BackendError(DecomtError):
    pass


class TransportError(BackendError):
    """Network-level failure; raised after the configured retries."""


class ProtocolError(BackendError):
    """The remote answered, but not in the documented wire format."""


class MaskCountError(BackendError):
    """Prompt did not contain exactly one mask placeholder."""


class PromptShapeError(BackendError):
    """The mock could not locate a recognizable test block in the prompt."""
