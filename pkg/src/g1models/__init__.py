"""Genus one models, their Omega invariants and the discriminant form."""

__version__ = "0.1.0"
