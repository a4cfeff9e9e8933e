"""Exception hierarchy shared by all weyllab modules.

Two branches matter for the CLI exit-code contract: DomainError maps to
exit code 1, ResourceError (budgets, cutoffs, precision ceilings) to 2.
"""


class WeylLabError(Exception):
    """Base class for all weyllab errors."""


class DomainError(WeylLabError):
    """Invalid mathematical input (bad parameters, out-of-range arguments)."""


class DivisibilityViolation(DomainError):
    """The tuple r breaks the divisibility chain r_j | r_{j+1}."""


class LengthMismatch(DomainError):
    """len(r) does not equal ell."""


class DomainTooSmall(DomainError):
    """Argument below the smallest value for which the quantity is defined."""


class EvenEllUnsupported(DomainError):
    """Operation requires odd ell (the sign cancellation needs (-1)^(h*ell) = (-1)^h)."""


class ResourceError(WeylLabError):
    """A configured budget, cutoff or precision ceiling was exceeded."""


class CapacityExceeded(ResourceError):
    """A lookup table would exceed the configured memory budget."""


class CutoffExceeded(ResourceError):
    """Brute-force oracle called beyond its configured cutoff."""


class BudgetExceeded(ResourceError):
    """Enumeration budget exhausted."""


class PrecisionCeilingExceeded(ResourceError):
    """Requested scan range cannot keep fractional parts accurate enough."""


class SearchFailed(ResourceError):
    """No qualifying integer found within the search budget."""


class QuadratureFailure(ResourceError):
    """Adaptive quadrature did not converge within the depth limit."""
