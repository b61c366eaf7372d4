"""Exception hierarchy shared by all solver modules."""


class PLapError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(PLapError, ValueError):
    """Raised when arguments violate an operation's preconditions."""


class InvalidInterval(InvalidInput):
    pass


class InvalidExponent(InvalidInput):
    pass


class InvalidParameter(InvalidInput):
    pass


class OutsideParabola(InvalidInput):
    """(lambda, k) lies outside the admissible region k**4 < lambda."""


class OutOfRange(InvalidInput):
    pass


class ZeroFunction(InvalidInput):
    pass


class Inadmissible(InvalidInput):
    """The root functional has no root in [0, inf) for this function."""


class SolverError(PLapError, RuntimeError):
    """Base class for numerical failures (non-convergence and friends)."""


class NonConvergence(SolverError):
    pass


class InversionFailure(SolverError):
    pass


class BracketFailure(SolverError):
    pass


class RootNotBracketed(SolverError):
    pass


class StepFailure(SolverError):
    pass


class NoAdmissibleStart(SolverError):
    pass


class MissingEigenResult(PLapError):
    pass
