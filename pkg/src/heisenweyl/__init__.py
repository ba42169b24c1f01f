"""Exact Heisenberg-manifold spectra, lattice counting remainders, and their mean-square statistics."""

__version__ = "0.1.0"
