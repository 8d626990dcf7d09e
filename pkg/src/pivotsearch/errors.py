"""Exception types shared across the package."""


class PivotSearchError(Exception):
    """Base class for all pivotsearch errors."""


class DimensionMismatch(PivotSearchError, ValueError):
    """Two vectors (or a vector and a corpus) live in different term spaces."""


class NumericalDrift(PivotSearchError, ArithmeticError):
    """A quantity that must be non-negative came out more negative than
    rounding alone can explain."""


class DegeneratePivot(PivotSearchError):
    """Candidate pivot is (numerically) inside the span of the current basis.

    Callers are expected to pick another candidate or stop splitting.
    """


class UnsplittableNode(PivotSearchError):
    """All split coordinates are identical; the node cannot be partitioned."""


class CorpusFormatError(PivotSearchError, ValueError):
    """A corpus or query file violates the line-oriented format."""


class IndexFormatError(PivotSearchError, ValueError):
    """A persisted index is corrupt or does not match the given corpus."""
