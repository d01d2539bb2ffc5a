"""Biharmonic interpolatory subdivision of curves.

Exact stencil derivation and symbol certification, Euclidean refinement
with fairness metrics, and subdivision on the sphere and the Poincare disk.
"""

from bhsubdiv.rational import Rational, rat_arith, rat_linsolve, rat_normalize
from bhsubdiv.stencils import RationalMask, builtin_mask, derive_hierarchy_mask, verify_sum_rules
from bhsubdiv.symbol import full_symbol, regularity_class, zero_order
from bhsubdiv.euclid import Polygon, subdivide, subdivide_step

__all__ = [
    "Polygon",
    "Rational",
    "RationalMask",
    "builtin_mask",
    "derive_hierarchy_mask",
    "full_symbol",
    "rat_arith",
    "rat_linsolve",
    "rat_normalize",
    "regularity_class",
    "subdivide",
    "subdivide_step",
    "verify_sum_rules",
    "zero_order",
]

__version__ = "0.1.0"
