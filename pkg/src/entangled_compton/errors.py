"""Exception types shared across the package."""


class ComptonError(Exception):
    """Base class for all package errors."""


class OffShellError(ComptonError, ValueError):
    """A spinor was requested for a momentum off the mass shell."""


class MaskedPointError(ComptonError):
    """A spectral point cannot be evaluated and must be reported as masked.

    Raised for soft/collinear kinematics (phase frequency below ``kappa_min``),
    lightfront singularities and the unsupported positron branch.
    """


class ConfigError(ComptonError, ValueError):
    """Invalid scan configuration."""
