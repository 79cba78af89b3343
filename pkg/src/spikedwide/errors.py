"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input: bad shapes, out-of-range parameters, broken orderings."""


class DomainError(ValueError):
    """Evaluation point outside the mathematical domain of a transform."""


class PoleError(ArithmeticError):
    """Evaluation point collides (or nearly collides) with a spectrum pole."""


class NumericalError(ArithmeticError):
    """A numerically degenerate situation the caller must resolve explicitly."""


class CertificationError(RuntimeError):
    """Contour root certification could not produce a trustworthy count."""


class ExperimentError(RuntimeError):
    """A Monte Carlo experiment failed as a whole (too many bad trials)."""
