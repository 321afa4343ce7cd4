"""Exception hierarchy.

Two failure families matter to callers: bad input (rejected before any
numerics run) and numeric breakdown (a well-formed request that hits a
singular or resonant configuration).  The CLI maps them to exit codes 2
and 3; the HTTP service maps them to 422 and 409.
"""


class ShapeFilterError(Exception):
    """Base class for all library errors."""


class InputError(ShapeFilterError, ValueError):
    """Invalid input or configuration (CLI exit code 2)."""


class NumericError(ShapeFilterError, ArithmeticError):
    """Numerical failure on valid input (CLI exit code 3)."""


# --- transfer functions ---

class NotProperError(InputError):
    """Denominator degree does not exceed numerator degree."""


class ZeroLeadingCoefficientError(InputError):
    """Leading numerator or denominator coefficient is zero."""


class UnsupportedPoleStructureError(InputError):
    """Pole layout outside real/simple, real/double, simple conjugate pairs."""


class PoleOnImaginaryAxisError(NumericError):
    """Spectral density evaluated at a frequency where the denominator vanishes."""


# --- realizations ---

class SamplePointOnPoleError(InputError):
    """Interpolation or evaluation point coincides with a pole."""


class SingularVandermondeError(NumericError):
    """Interpolation system is singular (duplicate sample points)."""


# --- basis and operators ---

class IndexNegativeError(InputError):
    """Basis index below zero."""


class TimeOutOfRangeError(InputError):
    """Time argument outside the basis horizon [0, T]."""


class QuadratureNotConvergedError(NumericError):
    """Panel refinement cap reached before meeting the tolerance."""


class ResonantParametersError(NumericError):
    """Oscillatory-block denominator vanishes (zero damping at a basis frequency)."""


class SingularOperatorError(NumericError):
    """Truncated operator matrix is not invertible at this order."""


# --- simulation and statistics ---

class GridMismatchError(InputError):
    """Ensemble members do not share a common time grid."""


class DegenerateFitError(NumericError):
    """Convergence-rate fit impossible (non-positive error values)."""
