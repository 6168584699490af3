"""Exception types shared across the package."""


class JDiscError(Exception):
    """Base class for all errors raised by this package."""


class SingularStructure(JDiscError):
    """det(J_st + J) or det(I - A conj(A)) is numerically zero."""


class NotAComplexStructure(JDiscError):
    """The candidate operator does not square to -identity."""


class UnderResolved(JDiscError):
    """Grid too coarse for the requested spectral degree."""


class DegreeOverflow(JDiscError):
    """An operation would exceed the workspace degree budget."""


class ModeMismatch(JDiscError):
    """Operator mode incompatible with the supplied arguments."""


class ComplementNotFound(JDiscError):
    """No holomorphic correction in the candidate pool lifts all kernel directions."""


class IllConditioned(JDiscError):
    """A linear solve exceeded the condition-number threshold."""


class OutOfValidityRegion(JDiscError):
    """A base map leaves the region where the structure data is valid."""


class NoConvergence(JDiscError):
    """Nonlinear iteration failed to reach the requested residual."""

    def __init__(self, message, residual=None, log=None):
        super().__init__(message)
        self.residual = residual
        self.log = log or []


class SurjectivityFailed(JDiscError):
    """A spanning family fails to reach full jet rank somewhere on the disc."""

    def __init__(self, message, worst_point=None, sigma_min=None):
        super().__init__(message)
        self.worst_point = worst_point
        self.sigma_min = sigma_min


class PerturbationFailed(JDiscError):
    """Randomized perturbation exhausted its retry budget."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class RankHypothesisViolated(JDiscError):
    """The defining map of a jet submanifold is degenerate at a detected zero."""


class ScenarioError(JDiscError):
    """Scenario file failed to parse or validate."""
