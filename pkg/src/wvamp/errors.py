"""Exception types shared across the package.

The CLI maps these onto exit codes: DomainError -> 3, NumericalError and
StatisticsError -> 4.
"""


class WvampError(Exception):
    pass


class DomainError(WvampError, ValueError):
    """Parameter outside the domain where an expression is defined."""


class DegeneratePostSelection(DomainError):
    """Post-selection amplitude (or weight) vanishes, so the weak value is 0/0."""


class CutoffTooSmall(DomainError):
    """Fock cutoff cannot hold the requested coherent state."""


class NumericalError(WvampError, ArithmeticError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class StatisticsError(WvampError):
    def __init__(self, message, n_accepted=0):
        super().__init__(message)
        self.n_accepted = n_accepted
