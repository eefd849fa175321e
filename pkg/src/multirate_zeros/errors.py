"""Exception types shared across the package."""


class MultirateError(Exception):
    """Base class for all errors raised by this package."""


class TauOutOfRange(MultirateError):
    """Blocking delay tau must lie in 1..N."""

    def __init__(self, tau: int, N: int):
        super().__init__(f"blocking delay tau={tau} outside 1..{N}")
        self.tau = tau
        self.N = N


class SingularA(MultirateError):
    """A is singular or too ill-conditioned to invert."""


class ResolventSingular(MultirateError):
    """Z*I - A_tau is too ill-conditioned to solve against."""


class ZeroZ(MultirateError):
    """The lifting relation is undefined at Z = 0."""


class CompressionFailure(MultirateError):
    """Every resampled random compression was ill-conditioned."""


class SingularD(MultirateError):
    """D_tau is singular where an invertible square D_tau is required."""


class UnsupportedDims(MultirateError):
    """Fixture block structure is inconsistent with the requested dimensions."""


class NotTallClass(MultirateError):
    """The closed-form predictions only cover tall systems."""

    def __init__(self, detail: str = ""):
        msg = "predictions require a tall system (N*p1 + p2 > N*m)"
        super().__init__(msg + (f": {detail}" if detail else ""))


class ConvergenceFailure(MultirateError):
    """The eigensolver failed to converge."""
