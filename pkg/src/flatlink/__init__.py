"""flatlink: exact linking and intersection decisions for flats in SL_m(R)/SO(m)."""

from .qkernel import QMatrix, QPoly, Rat, rat

__all__ = ["QMatrix", "QPoly", "Rat", "rat"]

__version__ = "0.1.0"
