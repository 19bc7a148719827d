"""Symmetric extensions of bipartite quantum states.

Closed-form extendibility conditions where they exist (two qubits, rank-2
states, Bell-diagonal and Z-correlated families), a constructive pure
extension for two qubits, a numerical feasibility oracle for everything
else, and the transfer of all of it to degradable / anti-degradable
channel classification.
"""

from . import channels, gallery, io, linalg, oracle, states, twoqubit
from .errors import SymextError

__all__ = ["channels", "gallery", "io", "linalg", "oracle", "states", "twoqubit", "SymextError"]
__version__ = "0.1.0"
