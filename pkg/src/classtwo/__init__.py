"""Groups of exponent p and class two as alternating bilinear maps over GF(p)."""

__version__ = "0.1.0"
