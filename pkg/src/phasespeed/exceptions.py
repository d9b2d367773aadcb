"""Exception and warning types raised by phasespeed."""


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


class NegativeDensityError(ValueError):
    """A classical density has values below the clipping threshold."""


class PurityError(ValueError):
    """A state expected to be pure has purity below tolerance."""


class OverlapResidualError(ArithmeticError):
    """Quadrature produced an overlap too far outside [0, 1] to clamp."""


class FocusingSingularity(ArithmeticError):
    """The Ermakov scaling factor collapsed towards zero."""


class DominanceViolation(RuntimeError):
    """A measured overlap rate exceeded its speed-limit velocity."""

    def __init__(self, message, index=None, time=None, margin=None):
        super().__init__(message)
        self.index = index
        self.time = time
        self.margin = margin


class ConfigError(ValueError):
    """Invalid scenario configuration."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class BoundaryWarning(UserWarning):
    """A field has non-negligible magnitude at the edge of its grid."""


class MassLossWarning(UserWarning):
    """Transport pulled mass in from outside the grid."""
