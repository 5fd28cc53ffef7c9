"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class QuadratureError(RuntimeError):
    """Quadrature failed to converge; ``partial`` carries the best estimate."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CertificationError(RuntimeError):
    """A certified tail bound is too large to decide the requested property."""


class ConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""


class SingularEnergyError(ValueError):
    """Coincident points make a non-positive-exponent energy infinite."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotPositiveDefiniteError(ValueError):
    """A coefficient table has a negative entry beyond tolerance."""
