class DomainError(ValueError):
    """Input outside the mathematical domain of an operation (exit status 1)."""


class NumericalIntegrityError(ArithmeticError):
    """A computed quantity violated a guaranteed bound or a stored table is corrupt (exit status 2)."""
