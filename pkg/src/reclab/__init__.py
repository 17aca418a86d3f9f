"""Exact p-adic laboratory for the Hilbert symbol in unramified p-extensions."""

from .errors import ReclabError
from .padic import PAdicScalar
from .symbol import SymbolResult, compare_all, gamma_artin_hasse, gamma_direct, gamma_general, gamma_trace_equation
from .tower import TowerElement, TowerParams, make_tower

__all__ = [
    "PAdicScalar",
    "ReclabError",
    "SymbolResult",
    "TowerElement",
    "TowerParams",
    "compare_all",
    "gamma_artin_hasse",
    "gamma_direct",
    "gamma_general",
    "gamma_trace_equation",
    "make_tower",
]
