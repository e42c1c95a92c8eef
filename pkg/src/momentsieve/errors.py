"""Exception hierarchy shared by all modules.

Domain errors (bad arguments, preconditions) map to CLI exit code 2,
capacity errors (resource or representation caps) to exit code 3.
"""


class MomentsieveError(Exception):
    exit_code = 1


class DomainError(MomentsieveError):
    exit_code = 2


class CapacityError(MomentsieveError):
    exit_code = 3


class SpecificationError(DomainError):
    """A weight or additive rule violated its own contract (e.g. negative weight)."""


class DegenerateVarianceError(DomainError):
    """Normalization by sqrt(B) requested while B <= 0."""


class FitError(DomainError):
    """Least-squares fit impossible (grid too narrow or singular)."""


class AccumulationOverflowError(CapacityError):
    """A weighted sum left the finite double range."""
