"""Interpolatory insertion masks with exact rational coefficients.

A mask of half-width ``m`` holds ``2m`` weights keyed by neighbour offset
``k = -(m-1), ..., m``; the inserted vertex between ``p[j]`` and ``p[j+1]``
is ``sum(a[k] * p[j+k])``. Midpoint symmetry pairs offset ``k`` with
``1 - k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from bhsubdiv.errors import InputError, UnknownSchemeError
from bhsubdiv.rational import rat_linsolve

__all__ = [
    "BUILTIN_SCHEMES",
    "RationalMask",
    "SumRuleReport",
    "builtin_mask",
    "derive_hierarchy_mask",
    "verify_sum_rules",
]


@dataclass(frozen=True)
class RationalMask:
    coefficients: tuple[Fraction, ...]
    half_width: int
    scheme_name: str = "custom"

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        m = self.half_width
        if m < 1:
            raise InputError(f"half width must be positive, got {m}")
        if len(coeffs) != 2 * m:
            raise InputError(f"mask of half width {m} needs {2 * m} coefficients, got {len(coeffs)}")
        if coeffs != coeffs[::-1]:
            raise InputError(f"mask {self.scheme_name} is not midpoint-symmetric")
        if sum(coeffs) != 1:
            raise InputError(f"mask {self.scheme_name} weights sum to {sum(coeffs)}, not 1")

    @classmethod
    def from_coefficients(cls, coefficients: Sequence, scheme_name: str = "custom") -> "RationalMask":
        if len(coefficients) % 2:
            raise InputError(f"mask needs an even number of coefficients, got {len(coefficients)}")
        return cls(tuple(Fraction(c) for c in coefficients), len(coefficients) // 2, scheme_name)

    @property
    def offsets(self) -> range:
        return range(1 - self.half_width, self.half_width + 1)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return zip(self.offsets, self.coefficients)

    def __getitem__(self, k: int) -> Fraction:
        if k not in self.offsets:
            return Fraction(0)
        return self.coefficients[k - self.offsets.start]

    @property
    def common_denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coefficients))

    def numerators(self) -> list[int]:
        den = self.common_denominator
        return [int(c * den) for c in self.coefficients]

    def as_floats(self) -> list[float]:
        return [float(c) for c in self.coefficients]


def _mask(nums, den, name):
    return RationalMask.from_coefficients([Fraction(n, den) for n in nums], name)


BUILTIN_SCHEMES = {
    "dgl4": ([-1, 9, 9, -1], 16),
    "bh6": ([3, -25, 150, 150, -25, 3], 256),
    "bh8": ([-5, 49, -245, 1225, 1225, -245, 49, -5], 2048),
}


def builtin_mask(scheme_id: str) -> RationalMask:
    try:
        nums, den = BUILTIN_SCHEMES[scheme_id]
    except KeyError:
        raise UnknownSchemeError(
            f"unknown scheme {scheme_id!r}; expected one of {', '.join(BUILTIN_SCHEMES)}"
        ) from None
    return _mask(nums, den, scheme_id)


def derive_hierarchy_mask(m: int) -> RationalMask:
    """Unique symmetric ``2m``-point mask satisfying the even sum rules.

    The unknowns are the weights at offsets ``1..m`` (offset ``1 - k`` gets
    the same weight as ``k``); row ``i`` imposes
    ``sum_k a_k k^(2i) = 4^-i`` for ``i = 0..m-1``.
    """
    if not isinstance(m, int) or m < 2:
        raise InputError(f"hierarchy index m must be an integer >= 2, got {m!r}")
    A = [[Fraction(k) ** (2 * i) + Fraction(1 - k) ** (2 * i) for k in range(1, m + 1)] for i in range(m)]
    b = [Fraction(1, 4**i) for i in range(m)]
    half = rat_linsolve(A, b)  # weights at offsets 1..m
    coeffs = list(reversed(half)) + half
    return RationalMask(tuple(coeffs), m, f"bh{2 * m}")


@dataclass(frozen=True)
class SumRuleReport:
    degree: int
    lhs: Fraction
    rhs: Fraction

    @property
    def satisfied(self) -> bool:
        return self.lhs == self.rhs


def verify_sum_rules(mask: RationalMask, max_degree: int) -> list[SumRuleReport]:
    return [
        SumRuleReport(n, sum((a * Fraction(k) ** n for k, a in mask.items()), Fraction(0)), Fraction(1, 2**n))
        for n in range(max_degree + 1)
    ]
