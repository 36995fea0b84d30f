"""Exception types shared across the package.

The CLI maps these onto exit codes: validation -> 1, capacity -> 2,
numerical failure -> 3.
"""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class CapacityError(RuntimeError):
    """A dense computation would exceed the configured matrix-size cap."""


class SingularEnergyError(ArithmeticError):
    """The energy lies in (or numerically on) the spectrum of the operator."""


class NumericalError(ArithmeticError):
    """A linear-algebra result failed its accuracy check."""


class ValidationError(ValueError):
    """A configuration violates one or more constraints."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))
