"""Exception types shared across modules."""


class SketchSynthError(Exception):
    """Base class for package errors."""


class DimensionMismatch(SketchSynthError, ValueError):
    """A vector, raster, or parameter block has the wrong shape."""


class ResolutionTooSmall(SketchSynthError, ValueError):
    """Raster resolution below the supported minimum."""


class NonPositiveScale(SketchSynthError, ValueError):
    """Affine transform asked for scale <= 0."""


class EmptyCorpus(SketchSynthError, ValueError):
    """Training requested on an empty raster corpus."""


class EmptyStore(SketchSynthError, ValueError):
    """Mapper training requested with no examples."""


class NonFiniteInput(SketchSynthError, ValueError):
    """NaN or infinity where a finite value is required."""


class InvalidFrameCount(SketchSynthError, ValueError):
    """Audio render asked for fewer than one frame."""


class UnsupportedSampleRate(SketchSynthError, ValueError):
    """Sample rate outside the supported set."""


class UnsupportedVersion(SketchSynthError, ValueError):
    """Persisted document claims a format version we cannot read."""


class MalformedDocument(SketchSynthError, ValueError):
    """Persisted document is structurally invalid."""


class IoFailure(SketchSynthError, OSError):
    """Filesystem read/write failed."""
