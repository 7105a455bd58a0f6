"""Adaptive VQE simulation engine with exact statevector arithmetic."""

__version__ = "0.1.0"
