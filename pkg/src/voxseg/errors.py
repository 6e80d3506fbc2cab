"""Exception hierarchy shared across the toolkit."""


class VoxsegError(Exception):
    """Base class for all toolkit errors."""


class GridMismatch(VoxsegError):
    """Two volumes do not share the same voxel lattice."""


class IndexOutOfBounds(VoxsegError):
    """A voxel index falls outside the volume."""


class UnsupportedField(VoxsegError):
    """A header declares something outside the supported file subset.

    The message carries the offending header line verbatim.
    """


class MalformedHeader(VoxsegError):
    """The file header is structurally invalid or incomplete."""


class TruncatedPayload(VoxsegError):
    """The raw payload is shorter than the header-declared size."""


class IoFailure(VoxsegError):
    """A file could not be written or read at the OS level."""


class NoSeeds(VoxsegError):
    """A seed volume contains no labeled voxel."""


class InsufficientSeeds(VoxsegError):
    """Fewer than two distinct nonzero seed labels are present."""


class NonBinaryMask(VoxsegError):
    """An operation restricted to {0, 1} masks received other labels."""


class EmptyMask(VoxsegError):
    """An operation requiring foreground received an empty mask."""


class BothEmpty(VoxsegError):
    """Overlap is undefined when both masks are empty."""


class TooFewValues(VoxsegError):
    """Aggregate statistics need at least two values."""


class UnknownOperation(VoxsegError):
    """An operation token in a pipeline is not recognized."""
