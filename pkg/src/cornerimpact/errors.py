"""Exception hierarchy shared by all modules.

Input-contract violations derive from :class:`InvalidInput` (a ``ValueError``)
and map to CLI exit code 2; runtime numerical breakdowns derive from
:class:`NumericFailure` and map to exit code 3.
"""


class CornerImpactError(Exception):
    """Base class for all package errors."""


class InvalidInput(CornerImpactError, ValueError):
    """An argument violates a documented precondition."""


class NotOverDamped(InvalidInput):
    """Damping ratio alpha must exceed 1 for real characteristic roots."""


class OutOfPhase(InvalidInput):
    """A time argument lies outside the phase the closed form is valid on."""


class NoCrossing(InvalidInput):
    """The sliding motion never reaches the vertex (needs ds0 > 0)."""


class ScaleUnderflow(InvalidInput):
    """The stiffness is so large that the corner scale factor eta (or a
    quantity derived from it, tau0 ~ eta^4, W^2 ~ eta^-4) leaves the range
    of double precision.  Use the scale-free parameterisation instead."""


class ConfigError(InvalidInput):
    """A config file failed to parse or validate; message names the line."""


class ScaleFreeRun(InvalidInput):
    """Physical-time reconstruction requested for a run without a stiffness."""


class NumericFailure(CornerImpactError, RuntimeError):
    """A numerical procedure failed to converge or broke down."""


class SingularRadius(NumericFailure):
    """The radial coordinate reached zero; the central force is singular."""


class IntegrationFailure(NumericFailure):
    """The adaptive integrator gave up (step underflow or step budget)."""
