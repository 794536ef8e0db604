"""Bi-Hamiltonian deformations on Poisson-Lie groups."""

__version__ = "0.1.0"
