"""Error types shared across the planner."""

from __future__ import annotations


class StampError(Exception):
    """Base class for all planner errors."""


class ParseError(StampError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class SemanticError(StampError):
    """Structurally valid input that violates model rules (duplicate names,
    undeclared predicates, arity mismatches, bad probabilities)."""


class UnboundVariable(StampError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name}")
        self.name = name


class PreconditionViolated(StampError):
    def __init__(self, literal):
        super().__init__(f"precondition violated: {literal}")
        self.literal = literal


class OutOfBounds(StampError):
    """A configuration or pose lies outside the workspace bounds."""


class StartOrGoalInCollision(StampError):
    def __init__(self, which: str, contacts=()):
        super().__init__(f"{which} configuration in collision")
        self.which = which
        self.contacts = tuple(contacts)


class NoPlanFound(StampError):
    """Motion planning budget exhausted without connecting the trees."""


class PlacementFailed(StampError):
    """A benchmark builder could not place its movables without overlap."""


class MissingDescriptor(StampError):
    def __init__(self, action: str, param: str):
        super().__init__(f"no domain descriptor for ({action} {param})")
        self.action = action
        self.param = param


class GeneratorExhausted(StampError):
    """A finite generator ran out of candidates (distinct from hitting a budget)."""


class StateSpaceTooLarge(StampError):
    def __init__(self, limit: int):
        super().__init__(f"reachable state enumeration exceeded {limit} states")
        self.limit = limit


class NoProperPolicy(StampError):
    """The goal is unreachable with probability > 0 within the horizon."""


class DanglingState(StampError):
    def __init__(self, state_key):
        super().__init__("policy unrolling reached a state with no stored action")
        self.state_key = state_key


class Unsolvable(StampError):
    """Every plan refinement node is exhausted and unrefined mass remains."""


class ChildUnsolvable(StampError):
    """A refined abstract model admits no policy from the failure state."""


class TimeBudgetExceeded(StampError):
    """Raised internally when the run clock passes its budget.  The partial
    result travels on the exception."""

    def __init__(self, result=None):
        super().__init__("time budget exceeded")
        self.result = result


class PolicyModelMismatch(StampError):
    """A serialized policy references actions or outcomes the model lacks."""
