"""Exception hierarchy shared across the package.

Each CLI-facing error class carries a distinct process exit code so shell
callers can distinguish usage problems from bad files or degenerate data.
"""


class LyricmeterError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class UsageError(LyricmeterError):
    """Invalid arguments or configuration."""

    exit_code = 2


class InputOutputError(LyricmeterError):
    """A referenced file is missing or unreadable."""

    exit_code = 3


class FormatError(LyricmeterError):
    """A file exists but does not follow its expected format."""

    exit_code = 4

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DegenerateInputError(LyricmeterError):
    """Input is structurally valid but too small or too uniform to process."""

    exit_code = 5


class WordNotFoundError(LyricmeterError):
    """A word has no lexicon entry and fallback lookup is disabled."""

    exit_code = 5
