import cmath
import math
from fractions import Fraction

import pytest

from bhsubdiv.errors import NonConvergentSchemeError
from bhsubdiv.stencils import RationalMask, builtin_mask, derive_hierarchy_mask
from bhsubdiv.symbol import (
    LaurentSymbol,
    full_symbol,
    regularity_class,
    symbol_derivative_at_minus_one,
    symbol_magnitude,
    zero_order,
)


def test_symbol_layout():
    sym = full_symbol(builtin_mask("bh6"))
    assert sym[0] == 1
    assert sym[-5] == Fraction(3, 256)
    assert sym[1] == Fraction(150, 256)
    assert sym.at_one() == 2


def test_bh6_derivative_table():
    sym = full_symbol(builtin_mask("bh6"))
    assert [symbol_derivative_at_minus_one(sym, k) for k in range(6)] == [0] * 6
    assert symbol_derivative_at_minus_one(sym, 6) == -225


def test_derivative_matches_direct_evaluation():
    # k-th derivative at -1 by brute force: sum a_n n(n-1)...(n-k+1) (-1)^(n-k)
    sym = full_symbol(builtin_mask("dgl4"))
    for k in range(6):
        direct = sum(
            a * math.prod(n - i for i in range(k)) * (-1) ** ((n - k) % 2) for n, a in sym.coefficients.items()
        )
        assert symbol_derivative_at_minus_one(sym, k) == direct


@pytest.mark.parametrize(
    "scheme, order, label", [("dgl4", 4, "C2"), ("bh6", 6, "C4"), ("bh8", 8, "C6")]
)
def test_regularity_ladder(scheme, order, label):
    cert = regularity_class(full_symbol(builtin_mask(scheme)))
    assert cert.zero_order == order
    assert cert.label == label
    assert cert.sharp
    assert cert.basis == "CDM-conditional"


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_hierarchy_zero_order(m):
    assert zero_order(full_symbol(derive_hierarchy_mask(m))) == 2 * m


def test_last_derivatives():
    expected = {2: 9, 3: -225, 4: 11025, 5: -893025, 6: 108056025}
    for m, value in expected.items():
        cert = regularity_class(full_symbol(derive_hierarchy_mask(m)))
        assert cert.derivative_table[-1] == (2 * m, value)


def test_low_order_masks():
    # any symmetric interpolatory mask has a(-1) = a'(-1) = 0, so order >= 2
    lin = RationalMask.from_coefficients([Fraction(1, 2), Fraction(1, 2)])
    assert regularity_class(full_symbol(lin)).label == "C0"
    flat = RationalMask.from_coefficients([Fraction(1, 4)] * 4)
    assert zero_order(full_symbol(flat)) == 2


def test_non_convergent_symbol():
    with pytest.raises(NonConvergentSchemeError):
        regularity_class(LaurentSymbol({0: Fraction(1), 1: Fraction(1, 2)}))


def test_magnitude_samples():
    sym = full_symbol(builtin_mask("bh6"))
    samples = dict(symbol_magnitude(sym, 3))
    assert samples[0.0] == pytest.approx(2.0, abs=1e-14)
    assert samples[math.pi / 2] == pytest.approx(1.0, abs=1e-14)
    assert samples[math.pi] == pytest.approx(0.0, abs=1e-14)


def test_dgl_magnitude_oracle():
    sym = full_symbol(builtin_mask("dgl4"))
    z = cmath.exp(1j * math.pi / 2)
    direct = abs(sum(float(a) * z**n for n, a in sym.coefficients.items()))
    assert dict(symbol_magnitude(sym, 3))[math.pi / 2] == pytest.approx(direct, abs=1e-14)
