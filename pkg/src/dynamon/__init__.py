"""Computational toolkit for periodic points of power maps and unicritical polynomials."""

__version__ = "0.1.0"
SCHEMA = "dynamon/1"
