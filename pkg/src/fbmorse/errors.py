"""Exception hierarchy shared by all subpackages."""


class FbMorseError(Exception):
    """Base class for every error raised by the package."""


class InvalidModel(FbMorseError, ValueError):
    pass


class InvalidDimension(FbMorseError, ValueError):
    pass


class OutOfChart(FbMorseError, ValueError):
    pass


class DegenerateInput(FbMorseError, ValueError):
    pass


class NotTraceless(FbMorseError, ValueError):
    pass


class NotApplicable(FbMorseError, ValueError):
    pass


class DegenerateCell(FbMorseError, ValueError):
    pass


class MassNotSPD(FbMorseError, ValueError):
    pass


class ConvergenceFailure(FbMorseError, RuntimeError):
    """Iterative eigensolver did not converge.

    ``diagnostics`` carries whatever the solver reported (iterations,
    converged pair count, shift).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class GapTooSmall(FbMorseError, RuntimeError):
    """The discrete spectrum does not separate cleanly from zero."""

    def __init__(self, message, eigenvalue=None, eps_gap=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.eps_gap = eps_gap
