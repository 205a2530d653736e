"""Exception taxonomy shared across the package.

Every error that can surface through the CLI carries a stable exit code so
that shell pipelines can react to failure classes without parsing messages.
The mapping is documented in the README (codes 1-8).
"""


class ParetoSubsetError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ParseError(ParetoSubsetError):
    """A file does not match its documented schema."""

    exit_code = 3


class InputError(ParetoSubsetError):
    """Numeric input is malformed: non-finite entries, crossed bounds, bad flags."""

    exit_code = 4


class DimensionError(InputError):
    """Shapes or sizes of numeric inputs are inconsistent or out of range."""

    exit_code = 4


class DegenerateDesignError(ParetoSubsetError):
    """The model matrix leaves some coefficient unbounded."""

    exit_code = 5

    def __init__(self, column: int, message: str | None = None):
        self.column = column
        super().__init__(message or f"coefficient {column + 1} is unbounded; "
                                    "the design matrix is rank deficient")


class ResourceLimitError(ParetoSubsetError):
    """A configured work limit was exhausted before the solve finished."""

    exit_code = 6


class IterationLimitError(ResourceLimitError):
    """The simplex iteration limit was exceeded."""


class NodeLimitError(ResourceLimitError):
    """The branch-and-bound node limit was exceeded.

    Carries the best incumbent found so far (or None) in ``incumbent``.
    """

    def __init__(self, message: str, incumbent=None):
        self.incumbent = incumbent
        super().__init__(message)


class FrontierIncompleteError(ResourceLimitError):
    """Frontier enumeration aborted; ``partial`` holds the incomplete frontier."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class GuardError(ParetoSubsetError):
    """A size guard protecting an exhaustive computation was violated."""

    exit_code = 7


class NumericalError(ParetoSubsetError):
    """The solver could not maintain numerical integrity on this input."""

    exit_code = 1
