"""Exception types shared across the package."""


class GsdError(Exception):
    """Base class for reasoner errors."""


class EvaluationError(GsdError, ValueError):
    """Evaluation of a non-ground or ill-formed expression."""


class BudgetExceeded(GsdError):
    """A node, state or wall-clock budget ran out before an answer was found."""

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.detail = detail


class FragmentViolation(GsdError, ValueError):
    """Input lies outside the fragment required by the selected backend."""

    def __init__(self, message: str, diagnostics=()):
        self.diagnostics = list(diagnostics)
        if self.diagnostics:
            message += ": " + "; ".join(self.diagnostics)
        super().__init__(message)
