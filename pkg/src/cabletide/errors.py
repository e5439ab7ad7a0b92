"""Exception hierarchy shared by all cabletide modules."""


class CableTideError(Exception):
    """Base class for every error raised by this package."""


# georoute
class AntipodalPoints(CableTideError, ValueError):
    pass


class InvalidStep(CableTideError, ValueError):
    pass


class ScalingOutOfRange(CableTideError, ValueError):
    pass


# tide
class TideEvaluationError(CableTideError):
    """A tide model cannot produce an elevation at the requested point."""


class OutOfGrid(TideEvaluationError, ValueError):
    pass


class MissingCell(TideEvaluationError, ValueError):
    pass


class GridFormatError(CableTideError, ValueError):
    """Grid file rejected on load."""


class ParseError(GridFormatError):
    pass


class DimensionMismatch(GridFormatError):
    pass


class NegativeAmplitude(GridFormatError):
    pass


# elastic
class NonPositiveLength(CableTideError, ValueError):
    pass


# instrument
class OverflowSamples(CableTideError, ValueError):
    pass


class RecordingFormatError(CableTideError, ValueError):
    """Recording CSV could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


# analysis
class AnalysisPreconditionError(CableTideError, ValueError):
    pass


class EmptySeries(AnalysisPreconditionError):
    pass


class WindowTooSmall(AnalysisPreconditionError):
    pass


class TooFewPoints(AnalysisPreconditionError):
    pass


class DegenerateTime(AnalysisPreconditionError):
    pass


class GridMismatch(AnalysisPreconditionError):
    pass


class ZeroVariance(AnalysisPreconditionError):
    pass


class SpanTooShort(AnalysisPreconditionError):
    pass
