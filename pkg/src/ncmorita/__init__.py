"""Exact and quadrature checks for Morita equivalences of crossed products of rotation algebras."""

__version__ = "0.1.0"
