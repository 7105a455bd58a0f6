"""Offline molecular-integral fixture generator (STO-3G, RHF)."""

__version__ = "0.1.0"
