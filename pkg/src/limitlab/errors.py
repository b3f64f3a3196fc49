"""Exception types and warning categories shared across the package."""


class LimitLabError(Exception):
    """Base class for all errors raised by this package."""


class NonUnitDirector(LimitLabError):
    """A director (or director field) is not unit length within tolerance."""


class NonUnitField(NonUnitDirector):
    """A director field violates |n|=1 pointwise."""


class DegenerateBulk(LimitLabError):
    """Bulk coefficients make a required formula degenerate (c<=0 or a pole)."""


class DegenerateGamma(LimitLabError):
    """Rotational viscosity gamma_1 vanishes where a division requires it."""


class NotInRange(LimitLabError):
    """Input lies outside the operator's invertible subspace beyond tolerance."""


class NotCritical(LimitLabError):
    """Base tensor of an expansion is not a bulk critical point."""


class BadEpsilon(LimitLabError):
    """The small parameter must be strictly positive."""


class GridMismatch(LimitLabError):
    """Fields in one expression do not share the same periodic grid."""


class StateBlowup(LimitLabError):
    """NaN or Inf detected in a simulation state."""


class CflViolation(LimitLabError):
    """Advective CFL condition violated for the requested time step."""


class StiffnessViolation(LimitLabError):
    """Time step too large for the explicitly treated stiff terms."""


class CertificateRefused(LimitLabError):
    """A dissipativity certificate failed and the run was not forced."""


class InsufficientPoints(LimitLabError):
    """Order fitting needs at least three data points."""


class NonPositiveError(LimitLabError):
    """Order fitting requires strictly positive error values."""


class SnapshotFormatError(LimitLabError):
    """A snapshot file is malformed or has an unexpected header."""


class ConfigError(LimitLabError):
    """A configuration file is malformed or contains unknown keys."""


class NotDissipative(UserWarning):
    """Parameters failed a dissipativity certificate (run continues)."""
