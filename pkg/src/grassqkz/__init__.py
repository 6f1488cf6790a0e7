"""Exact and numeric toolkit for qKZ/dynamical operators on Grassmannians."""

__version__ = "0.1.0"
