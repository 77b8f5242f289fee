"""Spectral laboratory for the 2D co-rotation FENE dumbbell model."""

__version__ = "0.1.0"
