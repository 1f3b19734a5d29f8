"""Exception hierarchy shared by all modules."""


class RSCError(Exception):
    """Base class for every error raised by rsclust."""

    exit_code = 3


class ValidationError(RSCError, ValueError):
    """Input rejected before any computation."""

    exit_code = 2


class InvalidInputError(ValidationError):
    pass


class RangeError(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


class InsufficientDataError(ValidationError):
    pass


class CausalityError(ValidationError):
    """AR(2) coefficients whose characteristic roots are not outside the unit circle."""


class GenerationError(RSCError):
    """Simulation could not produce a valid dataset."""

    exit_code = 3
