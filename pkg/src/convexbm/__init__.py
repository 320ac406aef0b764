"""Convex-body geometry: Gluskin polytopes, simplex sections and Banach-Mazur distances."""

__version__ = "0.1.0"
