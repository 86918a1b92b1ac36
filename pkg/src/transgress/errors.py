"""Exception hierarchy shared by all modules."""


class TransgressError(Exception):
    """Base class for library errors."""


class PolynomialError(TransgressError, ValueError):
    """Malformed polynomial input or ring mismatch."""


class GroebnerCapError(TransgressError):
    """A Groebner computation exceeded its degree cap."""


class SaturationError(TransgressError):
    """Saturation did not stabilize within its caps."""


class InfiniteColengthError(TransgressError):
    """The quotient stays infinite dimensional; usually a wrong codimension."""


class StabilizationError(TransgressError):
    """A Hilbert function did not stabilize within the allowed window."""


class NonGenericFiberError(TransgressError):
    """The fiber at the supplied point has larger dimension than expected."""


class SymbolicResidualError(TransgressError):
    """An identity expected to vanish exactly left a nonzero residual."""


class SingularMetricError(TransgressError, ArithmeticError):
    """A Hermitian metric is singular or not positive at an evaluation point."""


class VanishingSectionError(TransgressError, ArithmeticError):
    """A section vanishes where a nonvanishing one is required."""


class ChartDomainError(TransgressError, ValueError):
    """Evaluation requested outside a chart domain."""


class SeriesCapError(TransgressError):
    """A truncated series exceeded its degree cap."""


class ConvergenceError(TransgressError, ArithmeticError):
    """A refinement failed to converge."""


class DimensionMismatchError(TransgressError, ValueError):
    """Stratum dimension does not match the test form bidegree."""


class DomainViolationError(TransgressError, ValueError):
    """A correspondence operation was applied outside its domain."""


class ConfigError(TransgressError, ValueError):
    """Invalid verifier configuration."""
