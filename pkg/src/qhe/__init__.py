"""Quantum heat engines built from coupled oscillators and two-level atoms.

Reduced units throughout: hbar = k_B = g = 1.
"""

__version__ = "0.1.0"
