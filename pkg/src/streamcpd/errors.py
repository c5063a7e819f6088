"""Exception types shared across the package."""


class StreamCpdError(ValueError):
    """Base class for all streamcpd errors."""


class ParamDomainError(StreamCpdError):
    """A parameter value lies outside the family's open parameter domain."""


class SupportError(StreamCpdError):
    """A data value lies outside the family's support."""


class MeanRangeError(StreamCpdError):
    """A sufficient-statistic mean lies outside the closure of the mean map's range."""


class DegenerateSegmentError(StreamCpdError):
    """A segment mean is degenerate for the family (zero mean of a positive statistic)."""


class InsufficientDataError(StreamCpdError):
    """The statistic is requested before enough observations have arrived."""


class CalibrationError(RuntimeError):
    """Threshold calibration failed to converge; carries the last bracketing interval."""

    def __init__(self, message: str, lo: float, hi: float):
        super().__init__(message)
        self.lo = lo
        self.hi = hi
