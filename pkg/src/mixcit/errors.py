"""Exception hierarchy shared by all modules."""


class MixcitError(Exception):
    """Base class for domain errors raised by this package."""


class DomainError(MixcitError, ValueError):
    """Argument outside the domain of a mathematical function."""


class ConfigurationError(MixcitError, ValueError):
    """Invalid estimator, model or experiment configuration."""


class ParseError(MixcitError, ValueError):
    """Malformed dataset file.

    ``row`` and ``column`` locate the offending cell when known (row 1 is the
    first data row after the header).
    """

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaMismatchError(ParseError):
    """Declared schema does not match the file layout."""


class DegenerateColumnError(MixcitError, ValueError):
    """A column cannot be transformed, e.g. constant under standardization."""

    def __init__(self, column, reason):
        super().__init__(f"column {column!r}: {reason}")
        self.column = column


class DegenerateGeometryError(MixcitError, ValueError):
    """Nearest-neighbour geometry is degenerate (zero radius for a continuous estimator)."""

    def __init__(self, row, reason="k-th nearest neighbour at distance 0"):
        super().__init__(f"row {row}: {reason}")
        self.row = row


class EstimatorUndefinedError(MixcitError, ValueError):
    """The estimator has no defined value on this dataset."""


class CitEstimatorError(MixcitError):
    """Estimator failure inside a permutation test.

    ``stage`` is ``"observed"`` or ``"permuted"``; ``surrogate`` is the index
    of the failing surrogate for the latter.
    """

    def __init__(self, stage, cause, surrogate=None):
        where = stage if surrogate is None else f"{stage} surrogate {surrogate}"
        super().__init__(f"estimator failed on {where} data: {cause}")
        self.stage = stage
        self.surrogate = surrogate
        self.cause = cause
