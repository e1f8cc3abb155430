"""Partitioning qubit Hamiltonians into exactly solvable fragments."""
__version__ = "0.1.0"
