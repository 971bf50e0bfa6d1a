"""Exception types shared across the package."""


class ShockreflError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ShockreflError, ValueError):
    """Physically inadmissible input (non-positive density, gamma <= 1, ...)."""


class CavitationError(DomainError):
    """Bernoulli argument ran non-positive; the state would cavitate."""


class NoShockError(DomainError):
    """Upstream normal component is subsonic: only the trivial solution exists."""


class InadmissibleAngleError(DomainError):
    """Requested shock angle lies outside the admissible range."""


class DegenerateJumpError(DomainError):
    """Velocity jump too small to define a shock normal."""


class SubsonicUpstreamError(DomainError):
    """Shock polar requested for an upstream state with M <= 1."""


class DetachmentError(DomainError):
    """Requested turn angle exceeds the critical angle of the polar."""


class GeometryError(DomainError):
    """Reflection geometry is degenerate or ill-posed."""


class NumericalError(ShockreflError, RuntimeError):
    """A numerical procedure failed to converge; carries diagnostics."""


class RootNotFoundError(NumericalError):
    """No sign change found in the scanned interval."""


class FailedStepError(NumericalError):
    """A simulation step produced an invalid field (e.g. negative density)."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
