"""Exception types shared across the package."""


class JointSpaceError(Exception):
    """Base class for all errors raised by this package."""


class EmptyVocabularyError(JointSpaceError):
    """No token survived the frequency filter."""


class OOVWordError(JointSpaceError):
    """A word has no representation under the current model."""


class AllOOVError(JointSpaceError):
    """A document contains no embeddable token."""


class UnsupportedAggregationError(JointSpaceError):
    """The requested document aggregation is invalid for this method."""


class DatasetFormatError(JointSpaceError):
    """A dataset or sidecar file violates its documented format.

    ``line`` carries the offending 1-based record line when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateIdError(JointSpaceError):
    """The same id occurs more than once in a dataset or index."""


class DimensionMismatchError(JointSpaceError):
    """Vector dimensions disagree with the declared dimension."""


class ZeroVectorError(JointSpaceError):
    """A zero-norm vector reached an operation that requires a direction."""
