"""Exception types shared across the package."""


class StarResError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(StarResError, ValueError):
    """Numerical input violates a documented precondition."""


class CoverageError(StarResError):
    """A point lies outside every domain of a theory (fortress covering broken)."""


class UnsupportedGeometryError(StarResError):
    """Operation asked of a section geometry it does not support."""


class UnsupportedInputError(StarResError):
    """Input is structurally outside the scope the operation handles."""


class InfeasibleError(StarResError):
    """A linear program has no feasible point."""
