"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ParameterError -> 2, NumericalError -> 3.
"""


class TridensError(Exception):
    pass


class ParameterError(TridensError, ValueError):
    """Invalid distribution, ensemble or regime parameters."""


class NumericalError(TridensError, ArithmeticError):
    """An iterative routine failed to converge or lost too much accuracy."""


class SupportError(NumericalError):
    """A measure is not supported on the half-line (or interval) a decomposition requires."""
