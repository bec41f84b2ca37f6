"""Exception hierarchy shared by all capcones modules."""


class CapconesError(Exception):
    """Base class for every error raised by the package."""


class NonAdmissible(CapconesError):
    """The (g, m1, m2) triple is not an isoparametric multiplicity pattern."""


class NonIntegralDimension(CapconesError):
    """g(m1 + m2) is odd, so the ambient dimension would not be an integer."""


class DomainError(CapconesError, ValueError):
    """An argument lies outside the domain of a formula (usually a singular endpoint)."""


class PoleError(CapconesError, ValueError):
    """The hypergeometric parameter c is zero or a negative integer."""


class NoConvergence(CapconesError):
    """A series did not reach its tolerance within the iteration cap."""


class BracketFailure(CapconesError):
    """A scan found no sign change where one is expected."""


class ComplexExponents(CapconesError, ValueError):
    """The limit-equation exponents are complex, which is not supported."""


class StepFailure(CapconesError):
    """The ODE integrator gave up away from any known singular structure."""


class Unsupported(CapconesError):
    """The operation is not defined for this input (for example g <= 2 certificates)."""


class NoBracket(CapconesError):
    """A shooting bisection could not establish its initial bracket."""


class NoSignChange(CapconesError):
    """A residual scan found no sign change to bisect."""


class NonMonotone(CapconesError):
    """A monotone bisection encountered a non-monotone response it could not re-bracket."""


class BlowupError(CapconesError):
    """A shot blew up while positive where a zero was required."""


class WrongG(CapconesError, ValueError):
    """A closed form was requested for a foliation with the wrong number of curvatures."""


class NotOtFkm(CapconesError, ValueError):
    """The multiplicity pair is not of OT-FKM type."""


class MissingOtFkmParams(CapconesError, ValueError):
    """The classification depends on OT-FKM parameters that were not supplied."""
