"""Exception types shared across the package."""


class FsyrkError(Exception):
    """Base class for errors raised by this package."""


class NotASquare(FsyrkError, ValueError):
    """Raised when a square root is requested for a non-residue."""


class NoSkewUnitary(FsyrkError):
    """Raised when no matrix Y with Y.phi(Y) = -I exists for a ring/adjoint pair."""


class OddDimension(FsyrkError, ValueError):
    """Raised when a 2x2-block skew-unitary is requested for odd n."""


class DimensionMismatch(FsyrkError, ValueError):
    """Raised on non-conformable operands."""


class UnsupportedRing(FsyrkError, ValueError):
    """Raised when an operation is not defined for a ring/adjoint combination."""
