"""Admissible monomial bases of F2[x1..xk] over the mod-2 Steenrod algebra."""

__version__ = "0.1.0"
