"""Exception types shared across the package."""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, message: str, line_number: int | None = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class GraphValidationError(ValueError):
    pass


class InvalidPlanError(ValueError):
    """An edit plan that does not fit the graph it is applied to."""


class ParameterError(ValueError):
    pass


class InfeasibleError(RuntimeError):
    """Strict realization has no solution.

    ``reason`` is a short machine-readable hint: ``"odd-parity"``,
    ``"degree-bound"``, ``"cap"`` or ``"solver"``.
    """

    def __init__(self, reason: str, message: str) -> None:
        self.reason = reason
        super().__init__(message)


class SolverTimeoutError(RuntimeError):
    def __init__(self, message: str, bound: float, incumbent: float | None = None) -> None:
        self.bound = bound
        self.incumbent = incumbent
        super().__init__(message)


class DuplicateEdgeWarning(UserWarning):
    def __init__(self, count: int) -> None:
        self.count = count
        super().__init__(f"{count} duplicate edge(s) ignored")


class SelfLoopWarning(UserWarning):
    def __init__(self, count: int) -> None:
        self.count = count
        super().__init__(f"{count} self-loop(s) dropped")
