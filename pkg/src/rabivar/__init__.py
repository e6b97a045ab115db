"""Variational ground states of the quantum Rabi model."""

__version__ = "0.1.0"
