"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operands have incompatible dimensions."""


class ValidationError(ValueError):
    """An input value violates a documented precondition."""


class ContractViolation(ValueError):
    """A numerical precondition (e.g. Hermiticity) does not hold."""


class CodeConstructionError(ValueError):
    """A pair operator does not have the two-dimensional kernel a code needs."""

    def __init__(self, pair, kernel_dim):
        self.pair = tuple(pair)
        self.kernel_dim = int(kernel_dim)
        super().__init__(
            f"pair {self.pair}: kernel dimension {self.kernel_dim}, expected 2"
        )
