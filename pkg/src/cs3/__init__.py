"""Chern-Simons 3-forms and invariants of Lie-algebra-valued connections on
parallelizable 3-manifolds."""

from cs3.exact import PiRational

__all__ = ["PiRational"]
__version__ = "0.1.0"
