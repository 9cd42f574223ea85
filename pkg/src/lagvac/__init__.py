"""Measure-valued vacuum solutions of Lagrangian gas dynamics and elastodynamics."""

from .errors import LagvacError
from .thermo import GammaLaw, SymState, TabulatedLaw
from .waves import riemann_solve, vacuum_riemann_solve
from .scenarios import collapse_solution, offcenter_solution

__version__ = "0.1.0"

__all__ = ["LagvacError", "GammaLaw", "SymState", "TabulatedLaw", "riemann_solve",
           "vacuum_riemann_solve", "collapse_solution", "offcenter_solution", "__version__"]
