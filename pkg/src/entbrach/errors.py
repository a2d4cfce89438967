"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid input: wrong shape, non-Hermitian operator, bad file, etc."""


class NumericalError(ArithmeticError):
    """A residual contract was violated by a numerical kernel."""
