"""Exception hierarchy shared by all solver modules."""


class LineCoverageError(Exception):
    """Base class for every error raised by :mod:`linecover`."""


class InvalidInstance(LineCoverageError):
    pass


class DisconnectedInstance(InvalidInstance):
    """The deadhead graph is not strongly connected."""


class CostInvariantViolated(InvalidInstance):
    """A service cost is below the deadhead cost in the same direction."""

    def __init__(self, message, edge_id=None):
        super().__init__(message)
        self.edge_id = edge_id


class MissingCoordinates(LineCoverageError):
    pass


class WindTooStrong(LineCoverageError):
    pass


class NotBalanced(LineCoverageError):
    pass


class NotConnected(LineCoverageError):
    pass


class Unreachable(LineCoverageError):
    pass


class InfeasibleFlow(LineCoverageError):
    pass


class Infeasible(LineCoverageError):
    """No coverage tour with finite cost exists."""


class TooLarge(LineCoverageError):
    """Input exceeds the hard size cap of an exact method."""


class UnsatisfiableProfile(LineCoverageError):
    pass


class SchemaError(LineCoverageError):
    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
