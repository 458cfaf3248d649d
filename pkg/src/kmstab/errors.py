"""Exception types raised across the package."""


class KMStabError(Exception):
    """Base class for all package errors."""


class DomainError(KMStabError, ValueError):
    """An argument lies outside the domain of a function."""


class DegenerateInputError(KMStabError, ValueError):
    """Center vectors with coincident or unordered coordinates."""


class DegenerateCellError(KMStabError, ValueError):
    """A cell carries zero probability mass."""


class InvalidRegionError(KMStabError, ValueError):
    """Region parameters that do not describe a nonempty region."""


class AssumptionViolation(KMStabError):
    """A modelling assumption required by a bound does not hold."""


class NondifferentiableError(KMStabError):
    """The objective is not differentiable at the requested center vector."""


class SingularHessianError(KMStabError):
    """A cluster is empty, so the Hessian of the objective is singular."""


class InsufficientCandidatesError(KMStabError):
    """Fewer candidate centers than requested remain after pruning."""
