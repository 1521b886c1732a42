"""Turing machines, generalized shifts, Cantor block maps and their bordism skeletons."""

__version__ = "0.1.0"
