"""Exception hierarchy for photonbox."""

from __future__ import annotations


class PhotonBoxError(Exception):
    """Base class for every error raised by this package."""


class InputError(PhotonBoxError, ValueError):
    """Invalid input: a usage or configuration problem, not a numerical one."""


class NonPositiveInput(InputError):
    pass


class RegimeViolation(InputError):
    """Inputs leave the regime the linearized physics is valid in."""


class DegenerateSpec(InputError):
    """A spread is zero (or otherwise unusable for sampling)."""


class HUPViolation(InputError):
    """Spreads do not satisfy the configured uncertainty bound."""


class LengthMismatch(InputError):
    pass


class ConfigError(InputError):
    """Config file or override could not be parsed."""


class NumericalError(PhotonBoxError, ArithmeticError):
    """A computation could not be carried out to the requested accuracy."""


class AmplitudeTooSmall(NumericalError):
    """Oscillation amplitude cannot encode the requested momentum spread."""


class InsideHorizon(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class NoOrthogonalTime(NumericalError):
    """The evolved state never becomes orthogonal within the scan horizon.

    This is a legitimate outcome (e.g. for an eigenstate), not a bug.
    """
