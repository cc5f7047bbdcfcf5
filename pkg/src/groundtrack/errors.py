"""Exception types raised across the package."""


class TrackingError(ValueError):
    """Base class for all package errors."""


class DegenerateProjection(TrackingError):
    """Projective division by a (near) zero homogeneous coordinate."""


class SingularHomography(TrackingError):
    pass


class InvalidBox(TrackingError):
    pass


class EmptyWindow(TrackingError):
    pass


class EmptyBuffer(TrackingError):
    pass


class DegenerateMixing(TrackingError):
    pass


class SingularInnovation(TrackingError):
    pass


class ZeroLikelihoods(TrackingError):
    pass


class InvalidThresholds(TrackingError):
    pass


class NonMonotonicFrame(TrackingError):
    pass


class InvalidSpec(TrackingError):
    pass


class ConfigError(TrackingError):
    pass


class ParseError(TrackingError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.path = path
        self.line = line


class ObjectiveFailure(TrackingError):
    def __init__(self, config, cause):
        super().__init__(f"objective failed for {config!r}: {cause}")
        self.config = config
        self.cause = cause


class IoError(TrackingError):
    """A result or bundle file could not be written."""


class NegativeDimensions(UserWarning):
    """A detection row had a negative width or height; the box was clamped."""


class DuplicateFrame(UserWarning):
    """An affine file listed the same frame twice; the later row is kept."""
