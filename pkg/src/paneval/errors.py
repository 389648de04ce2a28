"""Exception hierarchy shared by all paneval modules.

The CLI maps these onto exit codes, so new exceptions should subclass the
category they belong to rather than PanevalError directly.
"""


class PanevalError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(PanevalError, ValueError):
    """An argument violates an operation's preconditions."""


class DimensionMismatchError(InvalidInputError):
    """Two inputs that must share a shape or dimension do not."""


class InsufficientSamplesError(InvalidInputError):
    """Too few rows to estimate the requested statistic."""


class DegenerateInputError(InvalidInputError):
    """Input is structurally valid but numerically unusable (e.g. zero norm)."""


class ManifestError(InvalidInputError):
    """A story manifest fails schema validation.

    ``pointer`` is the JSON-pointer path of the offending field.
    """

    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


class NumericError(PanevalError):
    """A computation produced a result outside its numeric contract."""


class NotPsdError(NumericError):
    """A matrix required to be positive semidefinite is not, beyond tolerance."""


class DecodeError(PanevalError):
    """An image file could not be read or decoded."""


class FormatError(PanevalError):
    """A feature or report file violates its declared format."""


class WriteError(PanevalError):
    """A file could not be written."""


class ProviderError(PanevalError):
    """Base class for embedding-provider failures."""


class ProviderUnreachableError(ProviderError):
    """The embedding service stayed unreachable after all retries."""


class EmbeddingNotFoundError(ProviderError):
    """A file-backed lookup has no entry for the requested text.

    ``text_hash`` is the hex SHA-256 of the missing text.
    """

    def __init__(self, text_hash):
        self.text_hash = text_hash
        super().__init__(f"no embedding stored for text hash {text_hash}")


class ProtocolError(ProviderError):
    """The embedding service answered with a malformed or inconsistent response."""
