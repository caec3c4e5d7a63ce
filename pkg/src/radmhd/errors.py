"""Exception types raised across the package."""


class RadMHDError(Exception):
    """Base class for all package errors."""


class CompatibilityViolation(RadMHDError):
    """Background radiative energy does not match a * theta_bar**4."""


class NonPositiveState(RadMHDError):
    """A density or temperature (or radiative temperature) is not positive."""


class InvalidParameter(RadMHDError, ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class EigenFailure(RadMHDError):
    """A dense eigensolve did not converge."""


class DampingPresent(RadMHDError):
    """An operation restricted to the undamped case was called with nu > 0."""


class NoCompensatorFound(RadMHDError):
    """The compensator search ended with a non-positive margin."""


class NonCoercive(RadMHDError):
    """A coercivity infimum is not positive."""


class GridTooSmall(RadMHDError):
    """Spectral grids need at least 4 points per axis."""


class ConfigError(RadMHDError):
    """Malformed configuration file; message carries the line number."""
