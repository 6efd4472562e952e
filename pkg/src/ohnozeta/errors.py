"""Exception hierarchy shared by every module."""


class OhnoZetaError(Exception):
    """Base class for all package errors."""


class InvalidInputError(OhnoZetaError, ValueError):
    """Malformed arguments: empty index, non-increasing tuple, duplicate nodes."""


class DomainError(OhnoZetaError, ValueError):
    """Mathematically invalid request, e.g. a non-admissible (divergent) index."""


class OutsideDomainError(DomainError):
    """Argument outside the region of absolute convergence.

    ``position`` is the 1-based l of the failing partial-sum condition for a
    multiple zeta function, or ``None`` for the single-variable bound on s.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class ConvergenceError(OhnoZetaError, ArithmeticError):
    """Adaptive evaluation hit its truncation cap before reaching tolerance.

    The best available :class:`~ohnozeta.precision.Evaluation` is attached
    as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CapabilityError(OhnoZetaError, ValueError):
    """Request exceeds the hard limits of a brute-force routine."""


class ConfigError(OhnoZetaError, ValueError):
    """Malformed suite description or grid specification."""
