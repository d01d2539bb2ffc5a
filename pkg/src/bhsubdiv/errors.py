"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: :class:`InputError` subclasses to 2,
:class:`NumericalError` subclasses to 3, :class:`InvariantError` to 4.
"""


class SubdivisionError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SubdivisionError, ValueError):
    """Malformed or out-of-contract input data."""


class NumericalError(SubdivisionError, ArithmeticError):
    """A computation hit a singular or degenerate configuration."""


class InvariantError(SubdivisionError, AssertionError):
    """An internal invariant was violated."""


class InvalidRationalError(InputError, ZeroDivisionError):
    pass


class DimensionMismatchError(InputError):
    pass


class SingularMatrixError(NumericalError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class NonConvergentSchemeError(NumericalError):
    pass


class ResonanceError(NumericalError):
    pass


class AntipodalError(NumericalError):
    pass


class DegenerateGeometryError(NumericalError):
    pass


class DiameterConditionError(InputError):
    """Initial polygon violates |K| h0^2 < 1/4."""


class UnknownSchemeError(InputError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""
