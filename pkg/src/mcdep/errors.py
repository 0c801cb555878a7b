"""Exception types shared across the package."""

from __future__ import annotations


class McdepError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(McdepError, ValueError):
    """An argument violates a documented precondition."""


class ModelViolationError(McdepError):
    """A user-supplied mapping or objective broke its declared contract."""


class InfeasibleSolutionError(McdepError):
    """A solution configuration failed a component's feasibility predicate."""

    def __init__(self, component_id: int, predicate: str, message: str | None = None):
        self.component_id = component_id
        self.predicate = predicate
        super().__init__(
            message or f"component {component_id}: solution rejected by {predicate}"
        )


class InfeasibleJointError(McdepError):
    """A joint solution is infeasible for one or more components."""

    def __init__(self, component_ids: tuple[int, ...]):
        self.component_ids = tuple(component_ids)
        ids = ", ".join(str(i) for i in self.component_ids)
        super().__init__(f"joint solution infeasible for components: {ids}")


class BudgetExceededError(McdepError):
    """An enumeration would exceed the configured budget."""

    def __init__(self, message: str, required: int | None = None, budget: int | None = None):
        self.required = required
        self.budget = budget
        super().__init__(message)


class ClassificationBudgetError(BudgetExceededError):
    """Feasible-set comparison is impossible within the configured budget."""

    def __init__(self, message: str, attempted: int, budget: int | None = None):
        self.attempted = attempted
        super().__init__(message, required=attempted, budget=budget)


class PartialGraphError(McdepError):
    """Connectivity is indeterminate because some pairs are unresolved."""


class ParseError(McdepError):
    """An instance file was rejected; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
