"""Biconfluent Heun equation: finite and infinite parabolic cylinder expansions,
gauge forms, the 2x2 connection and its degenerate Stokes data."""

from .errors import BiheunError
from .params import CanonicalParams, GeneralParams, JimboMiwaParams, Painleve4Params

__version__ = "0.1.0"

__all__ = [
    "BiheunError",
    "CanonicalParams",
    "GeneralParams",
    "JimboMiwaParams",
    "Painleve4Params",
    "__version__",
]
