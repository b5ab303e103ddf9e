"""Exception types raised across the package.

Every error derives from :class:`ChartingError` so callers (the CLI in
particular) can catch one type and still report the concrete reason.
"""


class ChartingError(Exception):
    """Base class for all package errors."""

    @property
    def reason(self):
        return type(self).__name__


class InvalidMatrix(ChartingError, ValueError):
    pass


class EmptyInput(ChartingError, ValueError):
    pass


class GlyphTooSparse(ChartingError, ValueError):
    pass


class DegenerateGeometry(ChartingError, ValueError):
    pass


class InvalidConfig(ChartingError, ValueError):
    pass


class InvalidAngle(ChartingError, ValueError):
    pass


class InvalidRange(ChartingError, ValueError):
    pass


class NoNoiseSubspace(ChartingError):
    pass


class NoSignal(ChartingError):
    pass


class InsufficientSubcarriers(ChartingError):
    pass


class DegenerateInput(ChartingError, ZeroDivisionError):
    pass


class SingularFit(ChartingError):
    pass


class SubarrayTooLarge(ChartingError):
    pass


class MissingModel(ChartingError):
    pass


class DegenerateFeatures(ChartingError):
    pass


class DuplicatePoints(ChartingError):
    pass


class InvalidK(ChartingError, ValueError):
    pass
