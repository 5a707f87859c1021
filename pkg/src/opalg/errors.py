"""Exception types shared across the package."""


class OpalgError(ValueError):
    """Base class for validation failures raised by this package."""


class DimensionError(OpalgError):
    pass


class NotAStateError(OpalgError):
    """A functional failed one of the state conditions.

    Attributes:
        condition: ``"positivity"`` or ``"normalization"``.
        amount: how far the offending quantity is outside the tolerance.
    """

    def __init__(self, condition: str, amount: float):
        self.condition = condition
        self.amount = float(amount)
        super().__init__(f"not a state: {condition} violated by {self.amount:.3e}")


class NotAProjectionError(OpalgError):
    def __init__(self, index: int, reason: str):
        self.index = index
        super().__init__(f"projection {index}: {reason}")


class HomomorphismError(OpalgError):
    """The supplied images do not define a *-homomorphism."""

    def __init__(self, law: str, residual: float):
        self.law = law
        self.residual = float(residual)
        super().__init__(f"{law} law violated (residual {self.residual:.3e})")


class InequivalentRepresentations(OpalgError):
    """Two GNS representations come from different states.

    ``witness`` is the index of a basis element b with rho1(b) != rho2(b).
    """

    def __init__(self, witness: int, gap: float):
        self.witness = witness
        self.gap = float(gap)
        super().__init__(f"states differ on basis element {witness} (gap {self.gap:.3e})")


class MonotonicityError(OpalgError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"eigenvalue sequence increases at k={index}")


class ToleranceError(ArithmeticError):
    """A numerical check exceeded its tolerance (distinct from bad input)."""
