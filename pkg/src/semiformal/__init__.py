"""Exact formal power series with semiformal extensions, and checks of the
identities behind two proofs that e is transcendental."""

from .exactnum import ENum, Ival, Rat, enclose_enum, enclose_exp, rat
from .exppoly import DivergentIntegralError, ExpPoly, euler_eval, improper_integral, newton_integral
from .series import HorizonError, Poly, TruncSeries, exp_series
from .verdict import Status, Verdict

__version__ = "0.1.0"

__all__ = [
    "DivergentIntegralError",
    "ENum",
    "ExpPoly",
    "HorizonError",
    "Ival",
    "Poly",
    "Rat",
    "Status",
    "TruncSeries",
    "Verdict",
    "enclose_enum",
    "enclose_exp",
    "euler_eval",
    "exp_series",
    "improper_integral",
    "newton_integral",
    "rat",
]
