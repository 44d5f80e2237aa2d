"""Exact computations for unitary Borcherds products over imaginary quadratic fields."""

__version__ = "0.1.0"
