"""Exception types shared by both simulation backends."""


class InvalidArgumentError(ValueError):
    """Raised for malformed inputs (bad mode index, shape mismatch, ...)."""


class NonUnitaryError(InvalidArgumentError):
    """A matrix passed as a passive network is not unitary."""

    def __init__(self, defect):
        self.defect = float(defect)
        super().__init__(f"matrix is not unitary: max |U^H U - I| = {self.defect:.3e}")


class TruncationOverflowError(RuntimeError):
    """Probability mass reached the top of a truncated Fock basis."""

    def __init__(self, weight, guard):
        self.weight = float(weight)
        self.guard = float(guard)
        super().__init__(
            f"truncation weight {self.weight:.3e} exceeds guard {self.guard:.1e}; "
            "increase the cutoff"
        )


class DegenerateSlopeError(ArithmeticError):
    """The signal slope vanishes at the evaluation point."""

    def __init__(self, eta0, slope):
        self.eta0 = float(eta0)
        self.slope = float(slope)
        super().__init__(
            f"signal slope {self.slope:.3e} is degenerate at evaluation point {self.eta0!r}"
        )
