"""Filtered free resolutions over the homogenized Weyl algebra, restriction of
D-modules along t = 0, and presentations of O[1/f]/O for quasi-homogeneous
isolated singularities."""

from .weyl import Signature, Operator, multiply, commutator, apply_substitution_h
from .filtration import ShiftedFreeModule, ModuleElement, OrderSpec, ord_F, ord_V

__version__ = "0.1.0"

__all__ = [
    "Signature",
    "Operator",
    "multiply",
    "commutator",
    "apply_substitution_h",
    "ShiftedFreeModule",
    "ModuleElement",
    "OrderSpec",
    "ord_F",
    "ord_V",
]
