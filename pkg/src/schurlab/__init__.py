"""Monochromatic products in random integer sets: solvers, constructions and a Monte Carlo lab."""

__version__ = "0.1.0"
