"""Laurent symbol of a binary interpolatory scheme and its zero order at -1.

Everything feeding the regularity certificate is exact; only
:func:`symbol_magnitude` works in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from bhsubdiv.errors import InputError, NonConvergentSchemeError
from bhsubdiv.stencils import RationalMask

__all__ = [
    "LaurentSymbol",
    "RegularityCertificate",
    "full_symbol",
    "regularity_class",
    "symbol_derivative_at_minus_one",
    "symbol_magnitude",
    "zero_order",
]


@dataclass(frozen=True)
class LaurentSymbol:
    coefficients: dict[int, Fraction]

    def __post_init__(self):
        clean = {int(n): Fraction(a) for n, a in self.coefficients.items() if a != 0}
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    def __getitem__(self, n: int) -> Fraction:
        return self.coefficients.get(n, Fraction(0))

    def at_one(self) -> Fraction:
        return sum(self.coefficients.values(), Fraction(0))

    @property
    def span(self) -> int:
        if not self.coefficients:
            return 0
        exps = list(self.coefficients)
        return exps[-1] - exps[0] + 1


def full_symbol(mask: RationalMask) -> LaurentSymbol:
    """Interleave the even rule (1 at z^0) with the odd weights.

    The weight for offset ``k`` sits at exponent ``2k - 1``; for the
    6-point mask this is ``{-5, -3, -1, 1, 3, 5}``.
    """
    coeffs = {0: Fraction(1)}
    for k, a in mask.items():
        coeffs[2 * k - 1] = a
    return LaurentSymbol(coeffs)


def symbol_derivative_at_minus_one(sym: LaurentSymbol, k: int) -> Fraction:
    if k < 0:
        raise InputError(f"derivative order must be non-negative, got {k}")
    total = Fraction(0)
    for n, a in sym.coefficients.items():
        falling = 1
        for i in range(k):
            falling *= n - i
        total += a * falling * (-1 if (n - k) % 2 else 1)
    return total


def _derivative_table(sym: LaurentSymbol) -> list[tuple[int, Fraction]]:
    if not sym.coefficients:
        raise InputError("zero symbol has no finite zero order")
    cap = 2 * len(sym.coefficients)
    table = []
    for k in range(cap + 1):
        d = symbol_derivative_at_minus_one(sym, k)
        table.append((k, d))
        if d != 0:
            return table
    raise NonConvergentSchemeError(f"no nonzero derivative at z=-1 up to order {cap}")


def zero_order(sym: LaurentSymbol) -> int:
    return _derivative_table(sym)[-1][0]


@dataclass(frozen=True)
class RegularityCertificate:
    zero_order: int
    regularity_m: int
    sharp: bool
    derivative_table: list[tuple[int, Fraction]] = field(default_factory=list)
    # The C^m class follows from the zero order only under the CDM criterion.
    basis: str = "CDM-conditional"

    @property
    def label(self) -> str:
        return f"C{self.regularity_m}"


def regularity_class(sym: LaurentSymbol) -> RegularityCertificate:
    table = _derivative_table(sym)
    order, last = table[-1]
    if order < 2:
        raise NonConvergentSchemeError(f"zero order {order} < 2; scheme not convergent under the CDM criterion")
    return RegularityCertificate(order, order - 2, last != 0, table)


def symbol_magnitude(sym: LaurentSymbol, n_samples: int) -> list[tuple[float, float]]:
    if n_samples < 2:
        raise InputError(f"need at least 2 samples, got {n_samples}")
    omega = np.linspace(0.0, np.pi, n_samples)
    exps = np.array(list(sym.coefficients), dtype=float)
    vals = np.array([float(a) for a in sym.coefficients.values()])
    z = np.exp(1j * np.outer(omega, exps)) @ vals
    return list(zip(omega.tolist(), np.abs(z).tolist()))
