"""Exception types raised across the package."""


class PoleError(ValueError):
    """Argument sits on a pole of Gamma / digamma."""


class DomainError(ValueError):
    """Argument outside the supported domain of an operation."""


class TruncationError(RuntimeError):
    """A truncated Boltzmann sum misses more weight than allowed.

    Attributes
    ----------
    tail : float
        Upper bound on the missing relative weight.
    tolerance : float
        The tolerance that was exceeded.
    """

    def __init__(self, tail, tolerance, message=None):
        self.tail = float(tail)
        self.tolerance = float(tolerance)
        if message is None:
            message = (f"truncation tail {self.tail:.3e} exceeds tolerance "
                       f"{self.tolerance:.1e}; increase the number of levels")
        super().__init__(message)


class BracketError(RuntimeError):
    """A root bracket did not contain a sign change."""
