"""Exception types raised by volcol."""


class VolcolError(ValueError):
    """Base class for all volcol errors."""


class NotSymmetricError(VolcolError):
    pass


class NotPSDError(VolcolError):
    pass


class DependentColumnsError(VolcolError):
    pass


class RankDeficientError(VolcolError):
    """The matrix does not have enough rank for the requested subset size."""


class DegeneratePivotError(VolcolError):
    pass


class InfeasibleCompletionError(VolcolError):
    pass


class OracleCapError(VolcolError):
    """Brute-force enumeration would exceed the configured cap."""
