"""Separating and intersecting codes from algebraic curves, with exact verifiers."""

__version__ = "0.1.0"
