"""Exception hierarchy shared by all modules.

Errors split into two families: precondition/validation failures
(``InputError``) and numerical failures that a caller may retry at higher
precision (``NumericalError``).  The CLI maps these to exit codes 2 and 3.
"""


class CycleIntegralsError(Exception):
    """Base class for all library errors."""


class InputError(CycleIntegralsError):
    """A precondition or validation failure; retrying will not help."""


class NumericalError(CycleIntegralsError):
    """A numerical failure; may succeed at higher precision."""


# -- poly ------------------------------------------------------------------

class ZeroPolynomial(InputError):
    pass


class DivisionByZeroPolynomial(InputError):
    pass


class NonConvergence(NumericalError):
    """Root finder failed to converge within the iteration budget."""


# -- cycles ----------------------------------------------------------------

class InvalidCycle(InputError):
    """Weights violate the zero-sum condition or are all zero."""


class FiberTooLarge(InputError):
    """Fiber size exceeds the exhaustive-enumeration cap."""


class DomainError(InputError):
    pass


class NonIntegerBound(CycleIntegralsError):
    """The simple-cycle bound formula produced a non-integer (a bug)."""


class GenericCycleNotFound(InputError):
    """Rejection sampling exhausted its retry budget."""


# -- tracking --------------------------------------------------------------

class NearCriticalValue(InputError):
    """Requested fiber lies inside the exclusion disk of a critical value."""


class PathThroughCriticalDisk(InputError):
    pass


class MatchingAmbiguous(NumericalError):
    """Continuation step size underflowed without a certified matching."""


class OrbitExplosion(CycleIntegralsError):
    """Monodromy orbit exceeded the vector cap."""


# -- melnikov --------------------------------------------------------------

class LengthMismatch(InputError):
    pass


class IdentityViolation(NumericalError):
    """The exact displacement identity failed beyond tolerance."""


class FitRejected(NumericalError):
    """Oracle fit residual stayed above tolerance at every precision tried."""


class SingularDesignSystem(NumericalError):
    """Design targets made the interpolation system singular."""


# -- counting --------------------------------------------------------------

class IdenticallyZeroIntegral(InputError):
    """The abelian integral vanishes identically; the count is undefined."""


class BranchMatchingAmbiguous(NumericalError):
    """Zero trajectories could not be matched across the epsilon schedule."""


# -- cli -------------------------------------------------------------------

class MalformedReport(InputError):
    pass
