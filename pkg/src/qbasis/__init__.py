"""qbasis: exact recurrence transforms for q-series in factorial bases.

The package turns a linear recurrence operator with coefficients in q and
q**n, together with a chosen factorial basis, into a certified recurrence
for the basis coefficients.  Everything is exact symbolic arithmetic over
the rationals; no floating point anywhere.
"""

from .mpoly import MPoly, Shift, VarTable
from .ratfn import RatFn

__all__ = [
    "MPoly",
    "RatFn",
    "Shift",
    "VarTable",
]

__version__ = "0.1.0"
