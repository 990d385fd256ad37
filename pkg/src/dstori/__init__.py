"""Singular de-Sitter tori from lightlike polygons, and the circle dynamics of their foliations."""

__version__ = "0.1.0"
