"""Exception and warning types shared across the package."""


class NcMoritaError(Exception):
    """Base class for all package errors."""


class PoleError(NcMoritaError, ZeroDivisionError):
    pass


class DetError(NcMoritaError, ValueError):
    pass


class NotQuadraticError(NcMoritaError, ValueError):
    pass


class ThetaMismatch(NcMoritaError, ValueError):
    pass


class WindowOverflow(NcMoritaError, ValueError):
    pass


class OffGridTranslation(NcMoritaError, ValueError):
    pass


class BoundaryOverflow(NcMoritaError, ValueError):
    pass


class SpecMismatch(NcMoritaError, ValueError):
    pass


class OrderMismatch(NcMoritaError, ValueError):
    """Raised when a word has the wrong order or its power is not scalar.

    ``residual`` carries the worst parallelism defect when one was measured.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class WindowTooSmall(NcMoritaError, ValueError):
    pass


class InconsistentCalibration(NcMoritaError, ValueError):
    def __init__(self, message, values=None, residual=None):
        super().__init__(message)
        self.values = values
        self.residual = residual


class TraceError(NcMoritaError, ValueError):
    pass


class ReplayError(NcMoritaError, RuntimeError):
    """A certificate failed exact replay."""


class ConfigError(NcMoritaError, ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class BoundaryDecay(UserWarning):
    """A sampled function is not negligible at the edge of its window."""
