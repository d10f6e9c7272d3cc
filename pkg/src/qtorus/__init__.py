"""Numerical quantum invariants of punctured-torus bundles at odd roots of unity."""

__version__ = "0.1.0"
