"""Shared exception types."""


class CtlabError(Exception):
    """Base class for all ctlab errors."""


class SignatureError(CtlabError):
    """Malformed signature, or objects over mismatched signatures."""


class ModelError(CtlabError):
    """Malformed assignment, function system, or team."""


class CycleError(ModelError):
    """A function system required to be recursive has a cyclic graph."""


class ParseError(CtlabError):
    """Lexical or syntactic error in a formula, or an ill-typed atom."""


class BudgetExceededError(CtlabError):
    """A construction or sweep would exceed the configured budget."""

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what}: needs {needed}, budget is {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


class ProofError(CtlabError):
    """Malformed derivation tree (distinct from a rule-check failure)."""
