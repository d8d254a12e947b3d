"""Exception types shared by the compiled and pure kernel backends."""


class PrecisionError(RuntimeError):
    """Float Gram-Schmidt data became unusable, or integer guards tripped."""


class NodeBudgetExceeded(RuntimeError):
    """Enumeration tree grew past the node budget; carries partial results."""

    def __init__(self, partial, budget):
        super().__init__(f"enumeration exceeded {budget} nodes")
        self.partial = partial
        self.budget = budget
