"""Error types raised by the solver pipeline."""


class IwgError(Exception):
    """Base class for all library errors."""


class HypothesisViolation(IwgError):
    """The level set crosses some mesh edge more than once."""


class NoBracket(IwgError):
    """Root finding was asked for an edge whose endpoint signs do not bracket a root."""


class DegenerateCut(IwgError):
    """A chord split produced a sub-polygon with (numerically) vanishing area."""


class SingularSystem(IwgError):
    """The 6x6 interface-basis system is ill conditioned beyond the trust threshold."""


class NotSPD(IwgError):
    """The reduced system is not symmetric positive definite."""


class NotConverged(IwgError):
    """The iterative solver exhausted its iteration budget."""


class MissingExactSolution(IwgError):
    """Error norms were requested for a problem without a registered exact solution."""


class MismatchedLadder(IwgError):
    """Convergence orders were requested for mesh sizes that do not halve h."""
