"""Exception hierarchy.

Input problems derive from :class:`InputError` (a ``ValueError``); numerical
failures derive from :class:`NumericalError` (an ``ArithmeticError``). The CLI
maps the two families onto distinct exit codes.
"""


class MldsError(Exception):
    """Base class for every error raised by this package."""


class InputError(MldsError, ValueError):
    """Invalid or inconsistent input."""


class NumericalError(MldsError, ArithmeticError):
    """A numerical procedure failed or produced an unusable result."""


class DimensionMismatch(InputError):
    pass


class SymmetryViolation(InputError):
    def __init__(self, max_deviation, sym_tol):
        self.max_deviation = float(max_deviation)
        self.sym_tol = float(sym_tol)
        super().__init__(
            f"tensor is not supersymmetric: max permutation deviation "
            f"{self.max_deviation:.6g} exceeds sym_tol {self.sym_tol:.6g}"
        )


class BadMode(InputError):
    pass


class OrderError(InputError):
    """The tensor order is not supported by the requested operation."""


class OddOrder(OrderError):
    pass


class NotPositive(InputError):
    pass


class NotUnitVector(InputError):
    pass


class NotOdeco(InputError):
    """A decomposition was used where an accepted odeco decomposition is required."""


class NoConvergence(NumericalError):
    def __init__(self, message, eigenvalues=(), factors=()):
        self.eigenvalues = list(eigenvalues)
        self.factors = list(factors)
        super().__init__(message)


class ResidualTooLarge(NumericalError):
    def __init__(self, residual, tol):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(f"eigen-residual {self.residual:.6g} exceeds tol {self.tol:.6g}")


class DivergentTerm(NumericalError):
    def __init__(self, mode, log_magnitude):
        self.mode = int(mode)
        self.log_magnitude = float(log_magnitude)
        super().__init__(
            f"closed-form term for mode {self.mode} has log-magnitude "
            f"{self.log_magnitude:.6g}, outside the double range"
        )
