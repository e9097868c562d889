"""Discrete Morse-Smale complexes on grids and triangle meshes."""

__version__ = "0.1.0"
