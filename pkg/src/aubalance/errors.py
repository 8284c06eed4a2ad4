"""Exception hierarchy. The CLI maps these onto exit codes."""


class BalancingError(Exception):
    """Base class for all errors raised by aubalance."""


class InputError(BalancingError):
    """Input records are unusable (empty, missing, unreadable)."""


class FormatError(InputError):
    """Malformed input file; carries the offending location when known."""

    def __init__(self, message, *, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = [str(path)] if path is not None else []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DimensionError(BalancingError, ValueError):
    """A count vector or label row has the wrong length."""


class DomainError(BalancingError, ValueError):
    """A count vector lies outside the feasible box."""


class ConsistencyError(BalancingError):
    """A record table does not match the problem or plan it is paired with."""


class InfeasibleError(BalancingError):
    """Solver settings admit no feasible point (e.g. budget below the base total)."""


class SearchSpaceTooLarge(InfeasibleError):
    """Exhaustive enumeration refused because the box is too large."""

    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"search space has {size} points, exceeds the brute-force limit of {limit}")
