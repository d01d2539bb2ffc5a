"""Exact rational arithmetic and linear solves.

Rationals are :class:`fractions.Fraction` instances, which already keep
canonical form (positive denominator, reduced, zero as 0/1) over Python's
arbitrary-precision integers. This module adds the string wire format and an
exact Gaussian elimination.
"""

from __future__ import annotations

import operator
from fractions import Fraction
from typing import Sequence

from bhsubdiv.errors import (
    DimensionMismatchError,
    InputError,
    InvalidRationalError,
    SingularMatrixError,
)

Rational = Fraction

_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def rat_normalize(n: int, d: int) -> Fraction:
    if d == 0:
        raise InvalidRationalError(f"zero denominator in {n}/{d}")
    return Fraction(int(n), int(d))


def rat_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    try:
        fn = _OPS[op]
    except KeyError:
        raise InputError(f"unknown rational operation {op!r}") from None
    if op == "div" and b == 0:
        raise InvalidRationalError(f"division of {a} by zero")
    return fn(Fraction(a), Fraction(b))


def rat_to_str(x: Fraction) -> str:
    """Serialize as ``"n/d"``; integers keep an explicit ``/1``."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rat_from_str(text: str) -> Fraction:
    text = str(text).strip()
    num, sep, den = text.partition("/")
    try:
        if sep:
            n, d = int(num), int(den)
        else:
            return Fraction(text)
    except ValueError as exc:
        raise InputError(f"malformed rational {text!r}") from exc
    return rat_normalize(n, d)


def rat_linsolve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``A x = b`` exactly by Gauss-Jordan elimination.

    The pivot is the first nonzero entry at or below the diagonal, so the
    elimination order is deterministic. Raises
    :class:`DimensionMismatchError` for shape problems and
    :class:`SingularMatrixError` (carrying the detected rank) when ``A``
    is rank deficient.
    """
    m = len(A)
    if any(len(row) != m for row in A):
        raise DimensionMismatchError(f"matrix is not square ({m} rows, row lengths {[len(r) for r in A]})")
    if len(b) != m:
        raise DimensionMismatchError(f"right-hand side has length {len(b)}, expected {m}")

    aug = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    rank = 0
    for col in range(m):
        pivot = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[col], aug[pivot] = aug[pivot], aug[col]
        rank += 1
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [vr - f * vc for vr, vc in zip(aug[r], aug[col])]
    if rank < m:
        raise SingularMatrixError(f"matrix is singular (rank {rank} < {m})", rank=rank)
    return [row[m] for row in aug]
