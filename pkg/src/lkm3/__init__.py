"""Exact reflective Jacobi forms, Borcherds-type products and the root data
of the 29 rank-three Lorentzian Kac-Moody algebras with paramodular
denominator functions."""

__version__ = "0.1.0"
